"""
Melnikov condition for the persistence of conservative orbits under delay.

Writing the delayed equation as the conservative oscillator x'' + x + x^3 = 0
perturbed by x - x(t - T), an orbit x = a1 cn(a2 t | m) survives (to first
order) when

    M(a1, T) = int_0^P cn(a2 (t - T)) sn(a2 t) dn(a2 t) dt = 0,

with a2^2 = 1 + a1^2, m = a1^2 / (2 (1 + a1^2)), and P = 4K(m) / a2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .elliptic import EllipticOrbit, cn_series, complete_K, dn_series, jacobi, sn_series
from .errors import AccuracyError, DomainError
from .harmonic_balance import undamped_amplitudes

__all__ = [
    "MelnikovSample",
    "ZeroCrossing",
    "CompareRow",
    "melnikov_integral",
    "sample",
    "default_scan_step",
    "scan_zeros",
    "analytic_amplitude",
    "HB_SLOPE",
    "compare_with_hb",
]

GL_ORDER = 16
MIN_PANELS = 16
MAX_PANELS = 4096
QUAD_TOL = 1e-9

# large-amplitude slope of the undamped ladder, A ~ (2 pi / sqrt 3) n / T
HB_SLOPE = 2.0 * math.pi / math.sqrt(3.0)


@dataclass(frozen=True)
class MelnikovSample:
    a1: float
    T: float
    value: float


@dataclass(frozen=True)
class ZeroCrossing:
    n: int
    a1: float
    bracket: tuple[float, float]


@dataclass(frozen=True)
class CompareRow:
    T: float
    numeric_zero: float | None
    hb_amplitude: float


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _composite_nodes(length: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss_legendre(order)
    h = length / panels
    left = np.arange(panels) * h
    nodes = (left[:, None] + 0.5 * h * (x[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * h * w, panels)
    return nodes, weights


def _integrand(orbit: EllipticOrbit, T: float, series_terms: int | None):
    a2, m = orbit.a2, orbit.m

    def f(t: np.ndarray) -> np.ndarray:
        if series_terms is None:
            sn, _, dn = jacobi(a2 * t, m)
            cn_delayed = jacobi(a2 * (t - T), m)[1]
        else:
            sn = sn_series(a2 * t, m, series_terms)
            dn = dn_series(a2 * t, m, series_terms)
            cn_delayed = cn_series(a2 * (t - T), m, series_terms)
        return cn_delayed * sn * dn

    return f


def melnikov_integral(
    a1: float,
    T: float,
    *,
    series_terms: int | None = None,
    order: int = GL_ORDER,
    tol: float = QUAD_TOL,
) -> float:
    """
    M(a1, T) by composite Gauss-Legendre quadrature over one orbit period.

    The panel count starts at 16 (16 nodes each) and doubles until two
    successive estimates differ by at most ``tol``. Passing ``series_terms``
    swaps the exact Jacobi functions for truncated nome series.

    Raises
    ------
    AccuracyError
        If the panel count exceeds the cap without settling.
    """
    if not a1 > 0.0:
        raise DomainError(f"a1 must be positive, got {a1!r}")
    orbit = EllipticOrbit.from_amplitude(a1)
    f = _integrand(orbit, float(T), series_terms)
    panels = MIN_PANELS
    nodes, weights = _composite_nodes(orbit.P, panels, order)
    prev = float(weights @ f(nodes))
    while panels < MAX_PANELS:
        panels *= 2
        nodes, weights = _composite_nodes(orbit.P, panels, order)
        cur = float(weights @ f(nodes))
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise AccuracyError(f"quadrature did not settle for a1={a1}, T={T} with {panels} panels")


def sample(a1: float, T: float, **kwargs) -> MelnikovSample:
    return MelnikovSample(a1=float(a1), T=float(T), value=melnikov_integral(a1, T, **kwargs))


def default_scan_step(T: float) -> float:
    """One tenth of the large-amplitude zero spacing 2 K(1/2) / T."""
    return 0.1 * 2.0 * complete_K(0.5) / T


def _bisect(f, lo: float, hi: float, f_lo: float, tol: float) -> tuple[float, float]:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid, mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return lo, hi


def scan_zeros(
    T: float,
    a1_min: float,
    a1_max: float,
    step: float | None = None,
    tol: float = 1e-6,
    *,
    series_terms: int | None = None,
) -> list[ZeroCrossing]:
    """
    Zeros of a1 -> M(a1, T) in [a1_min, a1_max].

    The grid brackets sign changes, each bracket is bisected down to ``tol``.
    An empty list means no sign change on the grid.
    """
    if not T > 0.0:
        raise DomainError(f"delay must be positive, got {T!r}")
    if not 0.0 < a1_min < a1_max:
        raise DomainError(f"need 0 < a1_min < a1_max, got [{a1_min}, {a1_max}]")
    spacing = 2.0 * complete_K(0.5) / T
    if step is None:
        step = default_scan_step(T)
    if not 0.0 < step < spacing / 4.0:
        raise DomainError(f"step {step} must be positive and below a quarter of the zero spacing {spacing:.4g}")
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol}")

    def f(a: float) -> float:
        return melnikov_integral(a, T, series_terms=series_terms)

    n_pts = int(math.floor((a1_max - a1_min) / step + 1e-9)) + 1
    grid = a1_min + step * np.arange(n_pts)
    if grid[-1] < a1_max:
        grid = np.append(grid, a1_max)
    values = [f(a) for a in grid]

    zeros: list[ZeroCrossing] = []
    for i in range(len(grid) - 1):
        v0, v1 = values[i], values[i + 1]
        if v0 == 0.0:
            lo = hi = float(grid[i])
        elif v0 * v1 < 0.0:
            lo, hi = _bisect(f, float(grid[i]), float(grid[i + 1]), v0, tol)
        else:
            continue
        zeros.append(ZeroCrossing(n=len(zeros) + 1, a1=0.5 * (lo + hi), bracket=(lo, hi)))
    if values[-1] == 0.0:
        a = float(grid[-1])
        zeros.append(ZeroCrossing(n=len(zeros) + 1, a1=a, bracket=(a, a)))
    return zeros


def analytic_amplitude(n: int, T: float) -> float:
    """Large-amplitude zero a1 = 2 K(1/2) n / T, about 3.708 n / T."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    if not T > 0.0:
        raise DomainError(f"delay must be positive, got {T!r}")
    return 2.0 * complete_K(0.5) * n / T


def compare_with_hb(T_values, tol: float = 1e-6) -> list[CompareRow]:
    """First numerical Melnikov zero next to the first undamped HB amplitude, per delay."""
    rows = []
    for T in T_values:
        T = float(T)
        guess = analytic_amplitude(1, T)
        zeros = scan_zeros(T, 0.05 * guess, 1.6 * guess, tol=tol)
        rows.append(
            CompareRow(
                T=T,
                numeric_zero=zeros[0].a1 if zeros else None,
                hb_amplitude=undamped_amplitudes(T, 1)[0].A,
            )
        )
    return rows
