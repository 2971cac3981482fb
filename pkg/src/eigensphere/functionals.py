"""Nonlinear functionals of a sampled field: excursion volume, defect,
chaos projections, and truncated Hermite expansions of a generic
nonlinearity."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import FieldSample
from .specfun import gauss_pdf_cdf, hermite_eval, hermite_ladder, sphere_measure

__all__ = [
    "ChaosCoefficients",
    "FunctionalValue",
    "indicator_coeffs",
    "excursion_volume",
    "defect",
    "hermite_projection",
    "generic_functional",
]


@dataclass(frozen=True)
class FunctionalValue:
    """Value of one functional on one sample; ``centered`` subtracts the
    analytic mean when it is known (zero for the defect and the q >= 1
    projections)."""

    kind: str  # "excursion" | "defect" | "projection" | "generic"
    value: float
    centered: float
    param: float | None = None  # level z or projection order q


@dataclass(frozen=True)
class ChaosCoefficients:
    """Truncated Hermite coefficients J_0..J_Q of a square-integrable
    nonlinearity.  J_0 is kept for mean bookkeeping only; expansions use
    the centered series starting at the rank."""

    coeffs: tuple[float, ...]
    tail_tol: float = 1e-2

    def __post_init__(self):
        if len(self.coeffs) < 3:
            raise ValueError("need coefficients at least up to order 2")
        q = self.truncation
        tail = self.coeffs[q] ** 2 / math.factorial(q)
        if tail > self.tail_tol:
            raise ValueError(
                f"last retained coefficient too heavy: J_Q^2/Q! = {tail:.3e} > {self.tail_tol:.1e}"
            )

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    @property
    def rank(self) -> int | None:
        """Smallest q >= 1 with J_q != 0, or None when all vanish."""
        for q in range(1, len(self.coeffs)):
            if self.coeffs[q] != 0.0:
                return q
        return None


def indicator_coeffs(z: float, truncation: int = 8) -> ChaosCoefficients:
    """Hermite coefficients of the level-z indicator: J_0 = 1 - Phi(z) and
    J_q = H_{q-1}(z) phi(z) for q >= 1."""
    if truncation < 2:
        raise ValueError(f"truncation must be >= 2, got {truncation}")
    pdf, cdf = gauss_pdf_cdf(z)
    coeffs = [1.0 - cdf]
    coeffs += [hermite_eval(q - 1, z) * pdf for q in range(1, truncation + 1)]
    return ChaosCoefficients(tuple(coeffs))


def excursion_volume(sample: FieldSample, z: float) -> FunctionalValue:
    """Quadrature measure of the region where the field exceeds z; centered
    against the exact mean mu_d * (1 - Phi(z))."""
    value = float(np.sum(sample.grid.weights * (sample.values > z)))
    mean = sphere_measure(sample.grid.d) * (1.0 - gauss_pdf_cdf(z)[1])
    return FunctionalValue("excursion", value, value - mean, param=float(z))


def defect(sample: FieldSample) -> FunctionalValue:
    """Positive-region volume minus negative-region volume.  Exact zeros
    contribute nothing (a probability-zero event, tolerated so reruns are
    bitwise stable)."""
    value = float(np.sum(sample.grid.weights * np.sign(sample.values)))
    return FunctionalValue("defect", value, value)


def hermite_projection(sample: FieldSample, q: int) -> FunctionalValue:
    """Order-q chaos projection: quadrature integral of H_q(field)."""
    if q < 0:
        raise ValueError(f"projection order must be >= 0, got {q}")
    value = float(np.sum(sample.grid.weights * hermite_eval(q, sample.values)))
    mean = sphere_measure(sample.grid.d) if q == 0 else 0.0
    return FunctionalValue("projection", value, value - mean, param=float(q))


def generic_functional(sample: FieldSample, coeffs: ChaosCoefficients) -> FunctionalValue:
    """Centered truncated expansion sum_{q=1}^{Q} (J_q / q!) integral of
    H_q(field); cross-checks direct evaluation of the nonlinearity."""
    rank = coeffs.rank
    if rank is None:
        raise ValueError("all J_q vanish for q >= 1: Hermite rank undefined")
    ladder = hermite_ladder(coeffs.truncation, sample.values)
    w = sample.grid.weights
    value = 0.0
    for q in range(1, coeffs.truncation + 1):
        if coeffs.coeffs[q] != 0.0:
            value += coeffs.coeffs[q] / math.factorial(q) * float(np.sum(w * ladder[q]))
    return FunctionalValue("generic", value, value)
