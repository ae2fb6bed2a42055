"""
Fixed-step simulation of x'' + alpha x' + x(t - T) + x^3 = 0.

The state (x, y = x') is advanced by classical RK4. The step is forced to
divide the delay, so every delayed lookup x(t - T) needed by a stage falls
either in the constant history (t - T <= 0) or inside a step that is already
complete, where it is read from the cubic Hermite interpolant built from the
stored (x, y) at the step's endpoints. The scheme stays fully explicit.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .elliptic import EllipticOrbit
from .errors import BracketError, DomainError, InsufficientDataError, NumericalError
from .harmonic_balance import damped_hb_solutions, undamped_amplitudes

__all__ = [
    "SimConfig",
    "Trajectory",
    "AmplitudeEstimate",
    "default_step",
    "integrate",
    "measure_amplitude",
    "classify_branch",
    "find_separatrix",
]

log = logging.getLogger(__name__)

MIN_STEPS_PER_DELAY = 4


def _amplitude_scale(T: float, alpha: float, x0: float, v0: float) -> float:
    """Largest amplitude a run from (x0, v0) is expected to visit."""
    scale = max(abs(x0), abs(v0), 1.0)
    if T > 0.0:
        if alpha > 0.0:
            sols = damped_hb_solutions(T, alpha)
            if sols:
                scale = max(scale, sols[-1].A)
        else:
            # next rung of the ladder above the starting amplitude
            n = 1
            while True:
                sols = undamped_amplitudes(T, n)
                if sols and sols[-1].A > scale:
                    scale = sols[-1].A
                    break
                n += 1
    return scale


def default_step(T: float, alpha: float, x0: float, v0: float = 0.0) -> float:
    """
    min(T/20, P/200), P the period of the conservative orbit at 1.2x the
    largest expected amplitude.
    """
    P = EllipticOrbit.from_amplitude(1.2 * _amplitude_scale(T, alpha, x0, v0)).P
    dt = P / 200.0
    if T > 0.0:
        dt = min(dt, T / 20.0)
    return dt


@dataclass(frozen=True)
class SimConfig:
    """
    One simulation run.

    The history is the constant state (x0, v0) for t <= 0. When T > 0 the
    step is shrunk to T/k with k = max(4, ceil(T/dt)) so that it divides the
    delay; ``dt=None`` selects :func:`default_step`.
    """

    T: float
    alpha: float = 0.0
    x0: float = 1.0
    v0: float = 0.0
    dt: float | None = None
    t_end: float = 200.0
    blowup_threshold: float = 1e6

    def __post_init__(self):
        if self.T < 0.0 or self.alpha < 0.0:
            raise DomainError(f"delay and damping must be non-negative (T={self.T}, alpha={self.alpha})")
        if not self.t_end > 0.0:
            raise DomainError(f"t_end must be positive, got {self.t_end}")
        if not self.blowup_threshold > 0.0:
            raise DomainError("blowup_threshold must be positive")
        dt = self.dt
        if dt is None:
            dt = default_step(self.T, self.alpha, self.x0, self.v0)
        if not dt > 0.0:
            raise DomainError(f"dt must be positive, got {dt}")
        if self.T > 0.0:
            dt = self.T / self.steps_per_delay_for(dt)
        object.__setattr__(self, "dt", float(dt))

    def steps_per_delay_for(self, dt: float) -> int:
        return max(MIN_STEPS_PER_DELAY, math.ceil(self.T / dt - 1e-9))

    @property
    def steps_per_delay(self) -> int:
        return round(self.T / self.dt) if self.T > 0.0 else 0


def _hermite(x0, y0, x1, y1, h, s):
    """Cubic Hermite value at fraction s of a step of length h."""
    s2 = s * s
    s3 = s2 * s
    return (
        (2 * s3 - 3 * s2 + 1) * x0
        + (s3 - 2 * s2 + s) * h * y0
        + (-2 * s3 + 3 * s2) * x1
        + (s3 - s2) * h * y1
    )


@dataclass(frozen=True)
class Trajectory:
    """
    Uniform-grid solution with cubic Hermite dense output.

    ``diverged`` is set when |x| exceeded the blow-up threshold; the arrays
    then stop at the first offending step and ``divergence_time`` records it.
    """

    times: np.ndarray
    x: np.ndarray
    v: np.ndarray
    dt: float
    diverged: bool = False
    divergence_time: float | None = None
    config: SimConfig | None = field(default=None, compare=False)

    def __post_init__(self):
        for arr in (self.times, self.x, self.v):
            arr.setflags(write=False)

    @classmethod
    def from_arrays(cls, times, x, v) -> "Trajectory":
        """Wrap externally sampled data; the grid must be uniform and start at 0."""
        times = np.array(times, dtype=float)
        x = np.array(x, dtype=float)
        v = np.array(v, dtype=float)
        if times.ndim != 1 or times.shape != x.shape or x.shape != v.shape or times.size < 2:
            raise DomainError("times, x, v must be 1-D arrays of equal length >= 2")
        dt = float(times[1] - times[0])
        if not dt > 0.0 or not np.allclose(np.diff(times), dt, rtol=1e-9, atol=0.0):
            raise DomainError("time grid must be uniform and increasing")
        return cls(times=times, x=x, v=v, dt=dt)

    @property
    def states(self) -> np.ndarray:
        return np.column_stack([self.x, self.v])

    def __call__(self, t):
        """Dense output x(t) for t inside the stored span."""
        t = np.asarray(t, dtype=float)
        if np.any(t < self.times[0] - 1e-12) or np.any(t > self.times[-1] + 1e-12):
            raise DomainError("dense output requested outside the trajectory span")
        i = np.clip(((t - self.times[0]) / self.dt).astype(int), 0, self.times.size - 2)
        s = (t - self.times[i]) / self.dt
        out = _hermite(self.x[i], self.v[i], self.x[i + 1], self.v[i + 1], self.dt, s)
        return float(out) if out.ndim == 0 else out


def integrate(cfg: SimConfig) -> Trajectory:
    """
    Integrate the delayed oscillator over [0, cfg.t_end].

    Raises
    ------
    NumericalError
        If the state becomes non-finite before the blow-up threshold catches it.
    """
    T, alpha, h = cfg.T, cfg.alpha, cfg.dt
    x_hist = cfg.x0
    k = cfg.steps_per_delay
    n_steps = math.ceil(cfg.t_end / h - 1e-9)
    xs = [0.0] * (n_steps + 1)
    ys = [0.0] * (n_steps + 1)
    x, y = float(cfg.x0), float(cfg.v0)
    xs[0], ys[0] = x, y
    limit = cfg.blowup_threshold
    half = 0.5 * h
    sixth = h / 6.0
    last = n_steps
    diverged = False

    for i in range(n_steps):
        if T > 0.0:
            j = i - k
            if j >= 0:
                # delayed stage times: t_j, t_j + h/2, t_j + h
                xa, xb = xs[j], xs[j + 1]
                xm = 0.5 * (xa + xb) + h * (ys[j] - ys[j + 1]) / 8.0
            elif j == -1:
                xa = xm = x_hist
                xb = xs[0]
            else:
                xa = xm = xb = x_hist
            k1x = y
            k1y = -alpha * y - xa - x * x * x
            x2 = x + half * k1x
            y2 = y + half * k1y
            k2x = y2
            k2y = -alpha * y2 - xm - x2 * x2 * x2
            x3 = x + half * k2x
            y3 = y + half * k2y
            k3x = y3
            k3y = -alpha * y3 - xm - x3 * x3 * x3
            x4 = x + h * k3x
            y4 = y + h * k3y
            k4x = y4
            k4y = -alpha * y4 - xb - x4 * x4 * x4
        else:
            k1x = y
            k1y = -alpha * y - x - x * x * x
            x2 = x + half * k1x
            y2 = y + half * k1y
            k2x = y2
            k2y = -alpha * y2 - x2 - x2 * x2 * x2
            x3 = x + half * k2x
            y3 = y + half * k2y
            k3x = y3
            k3y = -alpha * y3 - x3 - x3 * x3 * x3
            x4 = x + h * k3x
            y4 = y + h * k3y
            k4x = y4
            k4y = -alpha * y4 - x4 - x4 * x4 * x4
        x = x + sixth * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = y + sixth * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        xs[i + 1] = x
        ys[i + 1] = y
        if abs(x) > limit:
            last = i + 1
            diverged = True
            break
        if not (math.isfinite(x) and math.isfinite(y)):
            raise NumericalError(f"non-finite state at t={(i + 1) * h:g}")

    times = np.arange(last + 1, dtype=float) * h
    return Trajectory(
        times=times,
        x=np.array(xs[: last + 1]),
        v=np.array(ys[: last + 1]),
        dt=h,
        diverged=diverged,
        divergence_time=float(times[-1]) if diverged else None,
        config=cfg,
    )


@dataclass(frozen=True)
class AmplitudeEstimate:
    amplitude: float
    period: float
    n_peaks: int
    converged: bool
    spread: float
    peaks: np.ndarray = field(repr=False, compare=False, default=None)


def _peak_values(traj: Trajectory, start: int) -> tuple[np.ndarray, np.ndarray]:
    """Times and |x| at the zeros of x' after grid index ``start``."""
    x, v, h = traj.x, traj.v, traj.dt
    v0, v1 = v[start:-1], v[start + 1 :]
    idx = np.flatnonzero((v0 > 0.0) & (v1 <= 0.0) | (v0 < 0.0) & (v1 >= 0.0)) + start
    ts, amps = [], []
    for i in idx:
        xa, ya, xb, yb = x[i], v[i], x[i + 1], v[i + 1]
        # d/ds of the Hermite cubic: c2 s^2 + c1 s + c0
        c2 = 6 * xa + 3 * h * ya - 6 * xb + 3 * h * yb
        c1 = -6 * xa - 4 * h * ya + 6 * xb - 2 * h * yb
        c0 = h * ya
        s = _unit_root(c2, c1, c0)
        ts.append(traj.times[i] + s * h)
        amps.append(abs(_hermite(xa, ya, xb, yb, h, s)))
    return np.array(ts), np.array(amps)


def _unit_root(c2: float, c1: float, c0: float) -> float:
    """Root of c2 s^2 + c1 s + c0 in [0, 1]; endpoint of smaller |value| otherwise."""
    cands = []
    if abs(c2) > 1e-300:
        disc = c1 * c1 - 4 * c2 * c0
        if disc >= 0.0:
            sq = math.sqrt(disc)
            # numerically stable pair
            qq = -0.5 * (c1 + math.copysign(sq, c1))
            if qq != 0.0:
                cands += [qq / c2, c0 / qq]
            else:
                cands.append(0.0)
    elif c1 != 0.0:
        cands.append(-c0 / c1)
    inside = [s for s in cands if -1e-12 <= s <= 1 + 1e-12]
    if inside:
        return min(max(inside[0], 0.0), 1.0)
    return 0.0 if abs(c0) <= abs(c2 + c1 + c0) else 1.0


def measure_amplitude(
    traj: Trajectory, settle_fraction: float = 0.5, spread_tol: float = 1e-2
) -> AmplitudeEstimate:
    """
    Mean height of the |x| peaks after discarding a transient.

    Peaks sit where x' changes sign; each is refined on the Hermite interpolant.
    ``converged`` requires at least four peaks whose relative spread
    (max - min) / mean is below ``spread_tol``.
    """
    if not 0.0 <= settle_fraction < 1.0:
        raise DomainError(f"settle_fraction must lie in [0, 1), got {settle_fraction}")
    if traj.diverged:
        raise InsufficientDataError(f"trajectory diverged at t={traj.divergence_time:g}")
    start = int(settle_fraction * (traj.times.size - 1))
    ts, amps = _peak_values(traj, start)
    if amps.size < 8:
        raise InsufficientDataError(f"only {amps.size} turning points after the transient (need 8)")
    mean = float(amps.mean())
    spread = float((amps.max() - amps.min()) / mean) if mean > 0 else math.inf
    period = 2.0 * float(np.diff(ts).mean())
    return AmplitudeEstimate(
        amplitude=mean,
        period=period,
        n_peaks=int(amps.size),
        converged=bool(spread < spread_tol and amps.size >= 4),
        spread=spread,
        peaks=amps,
    )


def _hb_ladder(T: float, alpha: float, upto: float) -> list[float]:
    if T == 0.0:
        return []
    if alpha > 0.0:
        return [s.A for s in damped_hb_solutions(T, alpha)]
    n = 2
    while undamped_amplitudes(T, n)[-1].A < upto:
        n += 1
    return [s.A for s in undamped_amplitudes(T, n)]


def classify_branch(est: AmplitudeEstimate | None, ladder: list[float]) -> int:
    """Index of the harmonic-balance amplitude nearest the measured one; -1 if diverged."""
    if est is None:
        return -1
    if not ladder:
        return 0
    return int(np.argmin([abs(a - est.amplitude) for a in ladder]))


def find_separatrix(
    T: float,
    alpha: float,
    x_low: float,
    x_high: float,
    tol: float = 1e-3,
    *,
    t_end: float = 150.0,
    dt: float | None = None,
    settle_fraction: float = 0.75,
    max_extensions: int = 3,
) -> float:
    """
    Bisect on the initial displacement x0 (with v0 = 0) for the boundary
    between two basins of attraction.

    Each run is labelled by the harmonic-balance amplitude nearest its late-time
    amplitude. A probe that lands on neither endpoint's label (typically a slow
    transient near the unstable cycle) is re-run with a doubled horizon.

    Raises
    ------
    DomainError
        If the bracket is empty or tol is not positive.
    BracketError
        If both endpoints settle on the same branch.
    """
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    if not x_low < x_high:
        raise DomainError(f"bracket must satisfy x_low < x_high, got [{x_low}, {x_high}]")
    ladder = _hb_ladder(T, alpha, 2.0 * max(abs(x_low), abs(x_high)))
    if dt is None:
        dt = default_step(T, alpha, max(abs(x_low), abs(x_high)))

    def probe(x0: float, horizon: float) -> tuple[int, float]:
        traj = integrate(SimConfig(T=T, alpha=alpha, x0=x0, v0=0.0, dt=dt, t_end=horizon))
        if traj.diverged:
            return -1, math.inf
        est = measure_amplitude(traj, settle_fraction)
        return classify_branch(est, ladder), est.amplitude

    lo_label, lo_amp = probe(x_low, t_end)
    hi_label, hi_amp = probe(x_high, t_end)
    log.info("separatrix bracket: x0=%g -> %g, x0=%g -> %g", x_low, lo_amp, x_high, hi_amp)
    if lo_label == hi_label:
        raise BracketError(
            f"x0={x_low} and x0={x_high} both settle on amplitude ~{lo_amp:.4g} (branch {lo_label})"
        )

    lo, hi = float(x_low), float(x_high)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        horizon = t_end
        label, amp = probe(mid, horizon)
        for _ in range(max_extensions):
            if label in (lo_label, hi_label):
                break
            horizon *= 2.0
            label, amp = probe(mid, horizon)
        if label not in (lo_label, hi_label):
            label = lo_label if abs(amp - lo_amp) <= abs(amp - hi_amp) else hi_label
        if label == lo_label:
            lo = mid
        else:
            hi = mid
        log.debug("x0=%.6f amplitude=%.4f -> [%.6f, %.6f]", mid, amp, lo, hi)
    return 0.5 * (lo + hi)
