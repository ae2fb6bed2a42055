"""
Complete elliptic integrals, the nome, and Jacobi elliptic functions.

Every routine takes the parameter ``m = k**2`` (modulus squared), the same
convention as ``scipy.special.ellipk``/``ellipj``. With this convention
``complete_K(0.5) = 1.8541...``; at modulus ``k = 0.5`` the value would be
``1.6858...``.

Two evaluators are provided for sn, cn, dn:

- :func:`jacobi`, exact to rounding, via the descending Landen (AGM) recursion;
- :func:`sn_series`, :func:`cn_series`, :func:`dn_series`, truncated Fourier
  series in the nome ``q``. Truncating after ``N`` terms leaves a remainder of
  order ``q**(N + 1/2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "M_MAX",
    "EllipticOrbit",
    "complete_K",
    "nome",
    "jacobi",
    "sn_series",
    "cn_series",
    "dn_series",
]

M_MAX = 1.0 - 1e-12
_AGM_TOL = 1e-16
_AGM_MAXITER = 64


def _check_m(m: float, *, open_left: bool = False) -> float:
    m = float(m)
    if not math.isfinite(m) or m > M_MAX or m < 0.0 or (open_left and m == 0.0):
        lo = "(0" if open_left else "[0"
        raise DomainError(f"parameter m={m!r} outside {lo}, {M_MAX!r}]")
    return m


def _agm_ladder(m: float) -> tuple[list[float], list[float]]:
    """AGM sequence a_n and c_n starting from (1, sqrt(1-m), sqrt(m))."""
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    a_seq, c_seq = [a], [c]
    for _ in range(_AGM_MAXITER):
        if abs(c) <= _AGM_TOL * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return a_seq, c_seq


def complete_K(m: float) -> float:
    """
    Complete elliptic integral of the first kind, K(m) = pi / (2 AGM(1, sqrt(1-m))).

    Parameters
    ----------
    m : float
        Parameter k**2, 0 <= m <= 1 - 1e-12.

    Raises
    ------
    DomainError
        If m is outside the accepted range.
    """
    m = _check_m(m)
    a_seq, _ = _agm_ladder(m)
    return math.pi / (2.0 * a_seq[-1])


def nome(m: float) -> float:
    """Nome q = exp(-pi K(1-m) / K(m)) for 0 < m < 1."""
    m = _check_m(m, open_left=True)
    if 1.0 - m > M_MAX:
        # K(1-m) would need 1-m closer to 1 than the AGM domain allows
        raise DomainError(f"parameter m={m!r} too close to 0 for the nome")
    return math.exp(-math.pi * complete_K(1.0 - m) / complete_K(m))


def jacobi(z, m: float):
    """
    Simultaneous sn(z|m), cn(z|m), dn(z|m).

    ``z`` may be a scalar or an array; the return values have the same shape.
    The argument is first reduced modulo the real period 4K(m), then the
    amplitude phi is recovered by descending the AGM ladder.
    """
    m = _check_m(m)
    z_arr = np.asarray(z, dtype=float)
    if m == 0.0:
        sn, cn, dn = np.sin(z_arr), np.cos(z_arr), np.ones_like(z_arr)
    else:
        a_seq, c_seq = _agm_ladder(m)
        n = len(a_seq) - 1
        period = 2.0 * math.pi / a_seq[-1]  # 4K
        zr = z_arr - period * np.round(z_arr / period)
        phi = (2.0**n) * a_seq[-1] * zr
        for j in range(n, 0, -1):
            phi = 0.5 * (phi + np.arcsin(c_seq[j] / a_seq[j] * np.sin(phi)))
        sn, cn = np.sin(phi), np.cos(phi)
        # dn > 0 on the real line for m < 1
        dn = np.sqrt(1.0 - m * sn * sn)
    if np.ndim(z) == 0:
        return float(sn), float(cn), float(dn)
    return sn, cn, dn


def _series_setup(m: float, n_terms: int) -> tuple[float, float]:
    m = _check_m(m, open_left=True)
    if int(n_terms) != n_terms or n_terms < 1:
        raise DomainError(f"n_terms must be a positive integer, got {n_terms!r}")
    return complete_K(m), nome(m)


def sn_series(z, m: float, n_terms: int = 12):
    """Nome series sn = 2pi/(kK) sum q^(j+1/2) sin((2j+1)G) / (1 - q^(2j+1)), G = pi z/(2K)."""
    K, q = _series_setup(m, n_terms)
    G = np.pi * np.asarray(z, dtype=float) / (2.0 * K)
    total = 0.0
    for j in range(n_terms):
        total = total + q ** (j + 0.5) * np.sin((2 * j + 1) * G) / (1.0 - q ** (2 * j + 1))
    out = 2.0 * math.pi / (math.sqrt(m) * K) * total
    return float(out) if np.ndim(z) == 0 else out


def cn_series(z, m: float, n_terms: int = 12):
    """Nome series cn = 2pi/(kK) sum q^(j+1/2) cos((2j+1)G) / (1 + q^(2j+1)), G = pi z/(2K)."""
    K, q = _series_setup(m, n_terms)
    G = np.pi * np.asarray(z, dtype=float) / (2.0 * K)
    total = 0.0
    for j in range(n_terms):
        total = total + q ** (j + 0.5) * np.cos((2 * j + 1) * G) / (1.0 + q ** (2 * j + 1))
    out = 2.0 * math.pi / (math.sqrt(m) * K) * total
    return float(out) if np.ndim(z) == 0 else out


def dn_series(z, m: float, n_terms: int = 12):
    """
    Nome series dn = pi/(2K) + 2pi/K sum_{j>=1} q^j cos(2jG) / (1 + q^(2j)).

    The constant counts as the first term, so ``n_terms=1`` returns pi/(2K).
    """
    K, q = _series_setup(m, n_terms)
    G = np.pi * np.asarray(z, dtype=float) / (2.0 * K)
    total = np.full_like(G, math.pi / (2.0 * K))
    for j in range(1, n_terms):
        total = total + 2.0 * math.pi / K * q**j * np.cos(2 * j * G) / (1.0 + q ** (2 * j))
    return float(total) if np.ndim(z) == 0 else total


@dataclass(frozen=True)
class EllipticOrbit:
    """
    Closed orbit x(t) = a1 cn(a2 t | m) of x'' + x + x^3 = 0.

    Attributes
    ----------
    a1 : float
        Peak amplitude of x.
    a2 : float
        Time scale, a2**2 = 1 + a1**2.
    m : float
        Elliptic parameter a1**2 / (2 (1 + a1**2)), always below 1/2.
    K, Kprime : float
        K(m) and K(1 - m).
    q : float
        Nome exp(-pi Kprime / K).
    P : float
        Period 4K / a2.
    """

    a1: float
    a2: float
    m: float
    K: float
    Kprime: float
    q: float
    P: float

    @classmethod
    def from_amplitude(cls, a1: float) -> "EllipticOrbit":
        a1 = float(a1)
        if not (a1 > 0.0 and math.isfinite(a1)):
            raise DomainError(f"orbit amplitude must be positive and finite, got {a1!r}")
        s = a1 * a1
        a2 = math.sqrt(s + 1.0)
        m = s / (2.0 * (1.0 + s))
        K = complete_K(m)
        Kp = complete_K(1.0 - m)
        return cls(a1=a1, a2=a2, m=m, K=K, Kprime=Kp, q=math.exp(-math.pi * Kp / K), P=4.0 * K / a2)

    def x(self, t):
        """Position a1 cn(a2 t)."""
        return self.a1 * jacobi(np.asarray(t) * self.a2, self.m)[1]
