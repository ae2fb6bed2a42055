"""
Single-harmonic balance, Hopf and fold curves, and characteristic roots.

Substituting x = A cos(wt) into x'' + alpha x' + x(t-T) + x^3 = 0 and keeping
the first harmonic gives

    sin(wT) = alpha w,        -w^2 + cos(wT) + (3/4) A^2 = 0.

With alpha = 0 the first condition forces wT = n pi and the amplitudes form
the ladder A_n = (2/sqrt 3) sqrt(n^2 pi^2 / T^2 - (-1)^n).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError, RootFindingError

__all__ = [
    "HbSolution",
    "FoldCurve",
    "CharRoot",
    "undamped_amplitudes",
    "hopf_critical_delay",
    "hopf_frequency",
    "damped_hb_solutions",
    "tan_root",
    "fold_curves",
    "characteristic_roots",
    "region_count",
]

_XTOL = 1e-15
_RTOL = 4 * float(np.finfo(float).eps)
_NEWTON_MAXITER = 100
_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class HbSolution:
    """One harmonic-balance branch.

    ``n`` is the ladder index for alpha = 0 and the ordinal by amplitude
    otherwise. ``stable`` is a label by amplitude order (odd ordinals stable),
    not the outcome of a stability computation.
    """

    n: int
    omega: float
    A: float
    stable: bool


@dataclass(frozen=True)
class FoldCurve:
    """Tangency family alpha_n(T) = T cos(beta_n), omega = beta_n / T."""

    n: int
    beta: float
    active: bool

    @property
    def slope(self) -> float:
        return math.cos(self.beta)

    def alpha_of_T(self, T):
        return T * math.cos(self.beta)

    def omega_of_T(self, T):
        return self.beta / T


@dataclass(frozen=True)
class CharRoot:
    lam: complex
    residual: float


def _amplitude(omega: float, T: float) -> float | None:
    radicand = (4.0 / 3.0) * (omega * omega - math.cos(omega * T))
    if radicand < 0.0:
        return None
    return math.sqrt(radicand)


def undamped_amplitudes(T: float, n_max: int) -> list[HbSolution]:
    """Amplitude ladder for alpha = 0, n = 1..n_max.

    Even branches whose radicand n^2 pi^2 / T^2 - 1 is negative (only possible
    for T > pi) are left out.
    """
    if not T > 0.0:
        raise DomainError(f"delay must be positive, got {T!r}")
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max!r}")
    out = []
    for n in range(1, n_max + 1):
        omega = n * math.pi / T
        sign = 1.0 if n % 2 else -1.0
        radicand = (n * math.pi / T) ** 2 + sign
        if radicand < 0.0:
            continue
        out.append(HbSolution(n=n, omega=omega, A=2.0 / math.sqrt(3.0) * math.sqrt(radicand), stable=bool(n % 2)))
    return out


def hopf_frequency(alpha: float) -> float:
    """Crossing frequency w with w^2 = (-alpha^2 + sqrt(alpha^4 + 4)) / 2."""
    if alpha < 0.0:
        raise DomainError(f"damping must be non-negative, got {alpha!r}")
    return math.sqrt(0.5 * (-alpha * alpha + math.sqrt(alpha**4 + 4.0)))


def hopf_critical_delay(alpha: float) -> float:
    """Delay at which the origin of the linearised equation loses stability."""
    if alpha < 0.0:
        raise DomainError(f"damping must be non-negative, got {alpha!r}")
    s = -alpha * alpha + math.sqrt(alpha**4 + 4.0)
    return math.sqrt(2.0) * math.acos(min(1.0, s / 2.0)) / math.sqrt(s)


def _critical_points(T: float, alpha: float, w_hi: float) -> list[float]:
    """Zeros of d/dw [sin(wT) - alpha w] = T cos(wT) - alpha inside (0, w_hi)."""
    theta = math.acos(alpha / T)
    pts = []
    k = 0
    while True:
        base = 2.0 * math.pi * k
        for phase in (base - theta, base + theta):
            w = phase / T
            if 0.0 < w < w_hi:
                pts.append(w)
        if (base - theta) / T >= w_hi:
            break
        k += 1
    return sorted(pts)


def damped_hb_solutions(T: float, alpha: float, n_max: int = 10) -> list[HbSolution]:
    """
    All harmonic-balance cycles at delay T and damping alpha, sorted by amplitude.

    Roots of sin(wT) = alpha w lie in (0, 1/alpha]. The interval is cut at the
    zeros of the derivative so each piece is monotone and holds at most one
    root, which is then bisected. ``n_max`` only applies when alpha = 0, where
    the ladder is infinite.
    """
    if not T > 0.0:
        raise DomainError(f"delay must be positive, got {T!r}")
    if alpha < 0.0:
        raise DomainError(f"damping must be non-negative, got {alpha!r}")
    if alpha == 0.0:
        return undamped_amplitudes(T, n_max)
    if alpha >= T:
        # slope of sin(wT) never exceeds T, so only the trivial root w = 0
        return []

    def f(w: float) -> float:
        return math.sin(w * T) - alpha * w

    w_hi = 1.0 / alpha
    edges = [0.0] + _critical_points(T, alpha, w_hi) + [w_hi]
    omegas = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        f_lo = (T - alpha) if lo == 0.0 else f(lo)  # f(w)/w as w -> 0
        f_hi = f(hi)
        if f_hi == 0.0 and hi > 0.0:
            omegas.append(hi)
        elif f_lo * f_hi < 0.0:
            if lo == 0.0:
                # keep the bracket off the trivial root
                lo = hi * 1e-9
            omegas.append(bisect(f, lo, hi, xtol=_XTOL, rtol=_RTOL, maxiter=200))
    sols = []
    for w in omegas:
        A = _amplitude(w, T)
        if A is not None:
            sols.append((A, w))
    sols.sort()
    return [HbSolution(n=i + 1, omega=w, A=A, stable=bool((i + 1) % 2)) for i, (A, w) in enumerate(sols)]


def tan_root(n: int) -> float:
    """n-th positive root of tan x = x, located in (n pi, n pi + pi/2)."""
    if n < 1:
        raise DomainError(f"root index must be >= 1, got {n!r}")
    # sin x - x cos x has the same roots without the pole of tan
    g = lambda x: math.sin(x) - x * math.cos(x)  # noqa: E731
    lo, hi = n * math.pi, n * math.pi + 0.5 * math.pi
    return bisect(g, lo, hi, xtol=1e-15, rtol=_RTOL, maxiter=200)


def fold_curves(n_max: int, include_inactive: bool = False) -> list[FoldCurve]:
    """
    Saddle-node-of-cycles curves from the tangencies of alpha w and sin(wT).

    Only roots with cos(beta_n) > 0 give alpha > 0 and are marked active;
    pass ``include_inactive=True`` to get the others as well.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max!r}")
    curves = []
    for n in range(1, n_max + 1):
        beta = tan_root(n)
        active = math.cos(beta) > 0.0
        if active or include_inactive:
            curves.append(FoldCurve(n=n, beta=beta, active=active))
    return curves


def _char(lam: complex, T: float, alpha: float) -> complex:
    return lam * lam + alpha * lam + cmath.exp(-lam * T)


def _newton(seed: complex, T: float, alpha: float) -> complex | None:
    lam = seed
    for _ in range(_NEWTON_MAXITER):
        try:
            e = cmath.exp(-lam * T)
            f = lam * lam + alpha * lam + e
            df = 2.0 * lam + alpha - T * e
            step = f / df
        except (OverflowError, ZeroDivisionError):
            return None
        lam = lam - step
        if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
            return None
        if abs(step) <= 1e-15 * max(1.0, abs(lam)):
            break
    try:
        res = abs(_char(lam, T, alpha))
    except OverflowError:
        return None
    return lam if res <= _RESIDUAL_TOL else None


def characteristic_roots(T: float, alpha: float, n_branches: int = 3) -> list[CharRoot]:
    """
    Roots of lambda^2 + alpha lambda + exp(-lambda T) = 0 with Im lambda > 0.

    Newton iteration from seeds at i w for the harmonic-balance frequencies,
    the Hopf frequency, w = 1, and i pi (2j - 1) / (2T) for j = 1..n_branches.
    Distinct roots are returned in order of decreasing real part, at most
    ``n_branches`` of them.
    """
    if T < 0.0 or alpha < 0.0:
        raise DomainError(f"delay and damping must be non-negative, got T={T!r}, alpha={alpha!r}")
    if n_branches < 1:
        raise DomainError(f"n_branches must be >= 1, got {n_branches!r}")
    seeds = [1j, 1j * hopf_frequency(alpha)]
    if T > 0.0:
        seeds += [1j * s.omega for s in damped_hb_solutions(T, alpha, n_max=n_branches)]
        seeds += [1j * math.pi * (2 * j - 1) / (2.0 * T) for j in range(1, n_branches + 1)]
    roots: list[complex] = []
    for seed in seeds:
        lam = _newton(seed, T, alpha)
        if lam is None:
            continue
        if lam.imag <= 0.0:
            lam = lam.conjugate()
        if lam.imag <= 1e-12:
            continue
        if all(abs(lam - r) > 1e-8 * max(1.0, abs(r)) for r in roots):
            roots.append(lam)
    if not roots:
        raise RootFindingError(f"Newton failed from every seed (T={T}, alpha={alpha})")
    roots.sort(key=lambda z: -z.real)
    return [CharRoot(lam=r, residual=abs(_char(r, T, alpha))) for r in roots[:n_branches]]


def region_count(T: float, alpha: float) -> int:
    """Number of harmonic-balance limit cycles at (T, alpha)."""
    if not (T > 0.0 and alpha > 0.0):
        raise DomainError(f"delay and damping must be positive, got T={T!r}, alpha={alpha!r}")
    return len(damped_hb_solutions(T, alpha))
