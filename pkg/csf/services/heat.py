"""Caloric polynomials U_m(t, x), the polynomial solutions of u_t = u_xx with leading term x^m.

U_m(t, x) = sum_k m! / ((m - 2k)! k!) x^(m - 2k) t^k, and for t < 0

    U_m(t, x) = (-t)^(m/2) H_m(x / (2 sqrt(-t))),   H_m(z) := U_m(-1, 2z),

where H_m turns out to be the physicists' Hermite polynomial.
"""

import math
from fractions import Fraction

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import roots_hermite

from csf.services.solver import NumericalFailureError
from csf.types import FloatArray

# (power of x, power of t) -> coefficient
_Terms = dict[tuple[int, int], Fraction]


class HeatPolynomial(BaseModel):
    """U_m with exact integer coefficients."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=0)

    @property
    def coefficients(self) -> list[int]:
        """Coefficient c_k of x^(m-2k) t^k for k = 0 .. m // 2."""
        return [math.perm(self.m, 2 * k) // math.factorial(k) for k in range(self.m // 2 + 1)]

    def terms(self) -> _Terms:
        return {(self.m - 2 * k, k): Fraction(c) for k, c in enumerate(self.coefficients)}

    def __call__(self, t: ArrayLike, x: ArrayLike) -> FloatArray:
        t_arr = np.asarray(t, dtype=np.float64)
        x_arr = np.asarray(x, dtype=np.float64)
        total = np.zeros(np.broadcast(t_arr, x_arr).shape)
        for k, c in enumerate(self.coefficients):
            total = total + float(c) * x_arr ** (self.m - 2 * k) * t_arr**k
        return total


def heat_poly_eval(m: int, t: float, x: float) -> float:
    return float(HeatPolynomial(m=m)(t, x))


def _shifted_terms(m: int, amplitude: Fraction, shift: Fraction) -> _Terms:
    """Expand amplitude * U_m(t - shift, x) in powers of x and t."""
    terms: _Terms = {}
    for (px, pt), c in HeatPolynomial(m=m).terms().items():
        for j in range(pt + 1):
            key = (px, j)
            term = amplitude * c * math.comb(pt, j) * (-shift) ** (pt - j)
            terms[key] = terms.get(key, Fraction(0)) + term
    return terms


def heat_residual(m: int, amplitude: float = 1.0, shift: float = 0.0) -> float:
    """Largest coefficient of d/dt - d^2/dx^2 applied to amplitude * U_m(t - shift, x).

    Computed in exact rational arithmetic, so a solution gives exactly 0.
    """
    terms = _shifted_terms(m, Fraction(amplitude), Fraction(shift))
    residual: _Terms = {}
    for (px, pt), c in terms.items():
        if pt > 0:
            residual[(px, pt - 1)] = residual.get((px, pt - 1), Fraction(0)) + pt * c
        if px > 1:
            key = (px - 2, pt)
            residual[key] = residual.get(key, Fraction(0)) - px * (px - 1) * c
    return float(max((abs(v) for v in residual.values()), default=Fraction(0)))


def hermite(m: int, z: ArrayLike) -> FloatArray:
    """H_m(z) := U_m(-1, 2z)."""
    return HeatPolynomial(m=m)(-1.0, 2.0 * np.asarray(z, dtype=np.float64))


def heat_poly_zeros(m: int, t: float) -> list[float]:
    """Real zeros of x -> U_m(t, x), sorted.

    For t < 0 there are exactly m of them, 2 sqrt(-t) times the zeros of H_m.
    For t > 0 only x = 0 when m is odd.
    """
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    if t == 0:
        raise ValueError("t must be nonzero")
    if t > 0:
        return [0.0] if m % 2 else []
    nodes, _ = roots_hermite(m)
    roots = np.sort(2.0 * math.sqrt(-t) * nodes)
    if m % 2:
        roots[m // 2] = 0.0
    values = np.abs(HeatPolynomial(m=m)(t, roots))
    scale = np.abs(HeatPolynomial(m=m)(t, np.abs(roots) + math.sqrt(-t))).max()
    if not np.all(np.isfinite(roots)) or np.any(values > 1e-8 * max(scale, 1.0)):
        raise NumericalFailureError(f"zeros of U_{m}(t={t}, .) did not converge")
    return [float(r) for r in roots]


def largest_zero_scaled(m: int) -> float:
    """Largest zero z_m of H_m, i.e. half the largest zero of U_m(-1, .)."""
    return heat_poly_zeros(m, -1.0)[-1] / 2.0
