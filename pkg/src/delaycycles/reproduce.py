"""
Table and figure pipelines.

Each ``*_rows`` function returns plain data (lists of dicts or tuples); the CLI
turns them into CSV, JSON, or aligned text.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dde_sim import SimConfig, integrate, measure_amplitude
from .errors import InsufficientDataError
from .harmonic_balance import (
    characteristic_roots,
    damped_hb_solutions,
    fold_curves,
    hopf_critical_delay,
    undamped_amplitudes,
)
from .melnikov import analytic_amplitude, compare_with_hb, melnikov_integral

TABLE1_DELAY = 0.3
TABLE1_PRINTED = {1: 12.14, 2: 24.21, 3: 36.29, 4: 48.38, 5: 60.47, 6: 75.56, 7: 84.65, 8: 96.74, 9: 108.83}
TABLE1_NOTES = {6: "printed 75.56 reads as a digit slip of 72.56 (+1 radicand)"}

# (T, alpha): (printed eigenvalue or None for NRP/blank, printed calculated, printed observed)
TABLE2_PRINTED: dict[tuple[float, float], tuple[complex | None, tuple[float, ...], tuple[float, ...]]] = {
    (0.4, 0.1): (0.13 + 0.95j, (7.29,), (7.3,)),
    (0.4, 0.2): (0.09 + 0.90j, (5.64,), (5.5,)),
    (0.4, 0.3): (0.04 + 0.96j, (3.70,), (3.6,)),
    (0.4, 0.4): (None, (), ()),
    (0.6, 0.1): (0.20 + 0.91j, (5.25,), (5.4,)),
    (0.6, 0.2): (0.16 + 0.95j, (4.54,), (4.6,)),
    (0.6, 0.3): (0.12 + 0.95j, (3.76,), (3.7,)),
    (0.6, 0.4): (0.07 + 0.95j, (2.80,), (2.8,)),
    (0.6, 0.5): (0.02 + 0.95j, (1.78,), (1.8,)),
    (0.6, 0.6): (None, (), ()),
    (1.0, 0.1): (None, (3.59, 8.57, 9.91), (3.6, 10.0)),
    (2.0, 0.1): (None, (2.07, 3.64, 5.40, 7.40, 8.59), (2.1, 5.4, 8.8)),
}

OBSERVED_T_END = 600.0
SAME_BRANCH_RTOL = 0.02


def _table1_note(n: int, A: float, printed: float, T: float) -> str:
    if round(A, 2) == printed:
        return ""
    if n in TABLE1_NOTES:
        return TABLE1_NOTES[n]
    plus = 2.0 / math.sqrt(3.0) * math.sqrt((n * math.pi / T) ** 2 + 1.0)
    if round(plus, 2) == printed:
        return "printed value uses +1 in the radicand"
    if math.floor(A * 100.0) / 100.0 == printed:
        return "printed value truncated"
    return "differs from the formula"


def table1_rows(T: float = TABLE1_DELAY, n_max: int = 9) -> list[dict]:
    """Undamped ladder with the printed values alongside and a note on each mismatch."""
    rows = []
    for sol in undamped_amplitudes(T, n_max):
        printed = TABLE1_PRINTED.get(sol.n) if T == TABLE1_DELAY else None
        rows.append(
            {
                "n": sol.n,
                "omega": sol.omega,
                "A": sol.A,
                "printed": printed,
                "note": _table1_note(sol.n, sol.A, printed, T) if printed is not None else "",
            }
        )
    return rows


@dataclass
class ObservedResult:
    amplitudes: list[float] = field(default_factory=list)
    starts: list[float] = field(default_factory=list)
    decayed: bool = False


def staged_initial_conditions(T: float, alpha: float) -> list[float]:
    """x0 = 1, then the amplitude of every harmonic-balance branch labelled stable beyond the first."""
    starts = [1.0]
    for sol in damped_hb_solutions(T, alpha):
        if sol.stable and sol.n > 1:
            starts.append(sol.A)
    return starts


def observe(T: float, alpha: float, x0: float, t_end: float = OBSERVED_T_END) -> float | None:
    """Settled amplitude from (x0, 0); None when the motion decays to the origin."""
    traj = integrate(SimConfig(T=T, alpha=alpha, x0=x0, v0=0.0, t_end=t_end))
    if traj.diverged:
        return math.inf
    try:
        est = measure_amplitude(traj, 0.5)
    except InsufficientDataError:
        return None
    if not est.converged and est.peaks[-1] < est.peaks[0]:
        return None
    return est.amplitude


def _observe_job(args):
    return observe(*args)


def observed_amplitudes(
    T: float,
    alpha: float,
    workers: int = 1,
    t_end: float = OBSERVED_T_END,
) -> ObservedResult:
    """Distinct settled amplitudes reached from the staged initial conditions."""
    starts = staged_initial_conditions(T, alpha)
    jobs = [(T, alpha, x0, t_end) for x0 in starts]
    results = _map(_observe_job, jobs, workers)
    out = ObservedResult(starts=starts)
    for amp in results:
        if amp is None:
            continue
        if all(abs(amp - a) > SAME_BRANCH_RTOL * a for a in out.amplitudes):
            out.amplitudes.append(amp)
    out.amplitudes.sort()
    out.decayed = not out.amplitudes
    return out


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def leading_root(T: float, alpha: float) -> complex:
    return characteristic_roots(T, alpha, 1)[0].lam


def table2_rows(
    simulate: bool = False,
    workers: int = 1,
    progress: Callable[[str], None] | None = None,
    t_end: float = OBSERVED_T_END,
) -> list[dict]:
    rows = []
    for (T, alpha), (eig_p, calc_p, obs_p) in TABLE2_PRINTED.items():
        lam = leading_root(T, alpha)
        calc = [s.A for s in damped_hb_solutions(T, alpha)]
        row = {
            "T": T,
            "alpha": alpha,
            "eigenvalue": lam,
            "nrp": lam.real < 0.0,
            "calculated": calc,
            "observed": None,
            "printed_eigenvalue": eig_p,
            "printed_calculated": list(calc_p),
            "printed_observed": list(obs_p),
        }
        if simulate:
            row["observed"] = observed_amplitudes(T, alpha, workers=workers, t_end=t_end).amplitudes
            if progress is not None:
                progress(f"table2: T={T} alpha={alpha} observed={row['observed']}")
        rows.append(row)
    return rows


def hopf_curve_rows(alpha_min: float = 0.0, alpha_max: float = 2.0, steps: int = 201) -> list[tuple[float, float]]:
    return [(a, hopf_critical_delay(a)) for a in np.linspace(alpha_min, alpha_max, steps)]


def fold_rows(n_max: int = 6, t_max: float = 3.0, steps: int = 61, include_inactive: bool = False) -> list[tuple]:
    """Long format (n, beta, T, alpha_n) for every emitted fold curve."""
    rows = []
    for curve in fold_curves(n_max, include_inactive=include_inactive):
        for T in np.linspace(0.0, t_max, steps):
            rows.append((curve.n, curve.beta, T, curve.alpha_of_T(T)))
    return rows


def melnikov_curve_rows(T: float, a1_max: float | None = None, points: int = 400) -> list[tuple[float, float]]:
    if a1_max is None:
        a1_max = 4.5 * analytic_amplitude(1, T)
    return [(a, melnikov_integral(a, T)) for a in np.linspace(a1_max / points, a1_max, points)]


def compare_rows(T_values) -> list[tuple]:
    return [
        (r.T, r.numeric_zero if r.numeric_zero is not None else math.nan, r.hb_amplitude, analytic_amplitude(1, r.T))
        for r in compare_with_hb(T_values)
    ]


def fig1_rows(T: float = 0.3, starts=(26.681, 26.682), t_end: float = 100.0, stride: int = 10) -> tuple[list[str], list[tuple]]:
    trajs = [integrate(SimConfig(T=T, alpha=0.0, x0=x0, t_end=t_end, dt=T / 300)) for x0 in starts]
    header = ["t"] + [f"x_{x0:g}" for x0 in starts]
    n = min(tr.times.size for tr in trajs)
    rows = [
        (trajs[0].times[i],) + tuple(tr.x[i] for tr in trajs)
        for i in range(0, n, stride)
    ]
    return header, rows
