"""Moment integrals of the covariance polynomial and their high-degree limits.

Two independent numerical routes live here.  ``moment_integral`` evaluates

    I(ell, q, d) = int_0^{pi/2} G(cos theta)^q (sin theta)^(d-1) dtheta

by panel-wise Gauss-Legendre quadrature with panels commensurate with the
oscillation wavelength pi/ell.  ``asymptotic_constant`` evaluates the
limiting constants of ell^d * I from an oscillatory Bessel integral,
chunked between consecutive Bessel zeros with Euler acceleration for the
conditionally convergent cases.  The two routes share no code beyond the
Bessel evaluator, which is what makes their agreement a real check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .specfun import (
    bessel_j,
    bessel_j_derivative,
    gegenbauer_eval_many,
    sphere_measure,
)

__all__ = [
    "MomentResult",
    "ScalingLaw",
    "NonConvergedError",
    "moment_integral",
    "asymptotic_constant",
    "projection_variance",
    "scaling_law",
    "moment_result",
    "constant_sign_probe",
]


class NonConvergedError(RuntimeError):
    """Tail acceleration of the Bessel integral missed its tolerance."""


_PANEL_NODES = 16


def _gauss_legendre_panels(n_panels: int, a: float, b: float, nodes: int):
    """Composite Gauss-Legendre nodes/weights on [a, b] split evenly."""
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, n_panels + 1)
    lo = edges[:-1, None]
    hi = edges[1:, None]
    x = (0.5 * (hi - lo) * xg + 0.5 * (hi + lo)).ravel()
    w = (0.5 * (hi - lo) * wg + np.zeros_like(lo)).ravel()
    return x, w


def moment_integral(ell: int, q: int, d: int, *, nodes_per_panel: int = _PANEL_NODES) -> float:
    """Gegenbauer moment integral over [0, pi/2].

    Panel width is pi/(4*(ell+1)), a quarter of the oscillation
    wavelength, so fixed-order quadrature per panel is spectrally
    accurate and the total cost stays linear in ell.
    """
    if ell < 0 or q < 1 or d < 2:
        raise ValueError(f"need ell >= 0, q >= 1, d >= 2, got {(ell, q, d)}")
    n_panels = 2 * (ell + 1)
    theta, w = _gauss_legendre_panels(n_panels, 0.0, 0.5 * math.pi, nodes_per_panel)
    g = gegenbauer_eval_many(ell, d, np.cos(theta))
    return float(np.sum(w * g**q * np.sin(theta) ** (d - 1)))


def closed_form_c2(d: int) -> float:
    """c for q = 2: (d-1)! * mu_d / (4 * mu_{d-1})."""
    return math.factorial(d - 1) * sphere_measure(d) / (4.0 * sphere_measure(d - 1))


_C42 = 3.0 / (2.0 * math.pi**2)


def _bessel_zeros(nu: float, count: int) -> np.ndarray:
    """First ``count`` positive zeros of J_nu: McMahon expansion refined by
    Newton steps on the module's own Bessel evaluator."""
    k = np.arange(1, count + 1, dtype=float)
    beta = (k + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    z = (
        beta
        - (mu - 1.0) / (8.0 * beta)
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta) ** 3)
    )
    for _ in range(4):
        z = z - bessel_j(nu, z) / bessel_j_derivative(nu, z)
    return z


def _euler_limit(partial_sums: np.ndarray) -> tuple[float, float]:
    """Iterated pairwise averaging of an (eventually) alternating sequence
    of partial sums; returns (limit estimate, error estimate)."""
    s = np.asarray(partial_sums, dtype=float)
    while len(s) > 1:
        nxt = 0.5 * (s[:-1] + s[1:])
        if len(nxt) == 1:
            return float(nxt[0]), float(abs(nxt[0] - s[-1]))
        s = nxt
    return float(s[0]), math.inf


def asymptotic_constant(
    q: int,
    d: int,
    *,
    tol: float = 1e-6,
    max_zeros: int = 480,
    nodes_per_chunk: int = 32,
) -> float:
    """Limiting constant of ell^d (or ell^(d-1) for q=2) times the moment
    integral.

    q = 2 and (d, q) = (2, 4) return their closed forms; there the Bessel
    integral below diverges and the decay law carries an extra factor (see
    ``scaling_law``).  Every other pair evaluates

        pref * int_0^inf J_nu(psi)^q psi^(-q*nu + d - 1) dpsi,
        nu = d/2 - 1,  pref = (2^nu * Gamma(nu+1))^q,

    chunked between consecutive zeros of J_nu.  Odd q gives alternating
    chunk sums (zero-mean oscillation): Euler acceleration of the partial
    sums handles the conditionally convergent pairs.  Even q adds the
    analytic tail of the envelope mean beyond the last zero.
    """
    if q < 2:
        raise ValueError(f"asymptotic constant undefined for q < 2, got q={q}")
    if d < 2:
        raise ValueError(f"need d >= 2, got d={d}")
    if q == 2:
        return closed_form_c2(d)
    if (d, q) == (2, 4):
        return _C42
    nu = 0.5 * d - 1.0
    pref = (2.0**nu * math.gamma(nu + 1.0)) ** q
    a = -q * nu + d - 1.0
    zeros = _bessel_zeros(nu, max_zeros)
    xg, wg = np.polynomial.legendre.leggauss(nodes_per_chunk)
    edges = np.concatenate([[0.0], zeros])
    lo = edges[:-1, None]
    hi = edges[1:, None]
    x = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * wg + np.zeros_like(lo)
    j = bessel_j(nu, x.ravel()).reshape(x.shape)
    chunks = np.sum(w * pref * j**q * x**a, axis=1)
    seq = np.cumsum(chunks)
    if q % 2 == 0:
        # even q: J_nu^q has a strictly positive envelope mean, so the bare
        # partial sums converge only like 1/X; close each one with the
        # analytic tail of the leading asymptotic term, after which the
        # residual alternates and the same acceleration applies
        mean_q = math.comb(q, q // 2) / 2.0**q
        beta = a - 0.5 * q  # tail integrand exponent: psi^beta, beta < -1
        tail_pref = pref * (2.0 / math.pi) ** (0.5 * q) * mean_q / (-(beta + 1.0))
        seq = seq + tail_pref * edges[1:] ** (beta + 1.0)
    value, err = _euler_limit(seq[-64:])
    if not math.isfinite(value) or err > tol:
        raise NonConvergedError(
            f"accelerated tail for (q={q}, d={d}) estimated error {err:.2e} > {tol:.0e}"
        )
    return value


@dataclass(frozen=True)
class ScalingLaw:
    """Decay law of the moment integral: constant * log(ell)^log_power *
    ell^exponent; ``constant`` is None when no numeric value is available."""

    exponent: Fraction
    log_power: int
    constant: float | None


def scaling_law(q: int, d: int) -> ScalingLaw:
    """Decay law selected solely by (d, q); constants filled when known.

    For q = 2 the *bare* integral decays like c / ell^(d-1) with
    c = (d-1)! mu_d / (4 mu_{d-1}); the variance of the order-2 projection
    then carries the additional 2 * q! * mu_d * mu_{d-1} factor (see
    ``projection_variance``), which is verified numerically in the tests.
    """
    if q < 2 or d < 2:
        raise ValueError(f"scaling law needs q >= 2 and d >= 2, got {(q, d)}")
    if q == 2:
        return ScalingLaw(Fraction(-(d - 1)), 0, closed_form_c2(d))
    if (d, q) == (2, 4):
        return ScalingLaw(Fraction(-2), 1, _C42)
    try:
        c = asymptotic_constant(q, d)
    except NonConvergedError:
        c = None
    return ScalingLaw(Fraction(-d), 0, c)


def projection_variance(ell: int, q: int, d: int) -> float:
    """Variance of the order-q chaos projection of the degree-ell field:
    2 * q! * mu_d * mu_{d-1} * moment_integral(ell, q, d).

    Restricted to even ell; the closed-form reduction of the sphere-pair
    integral to [0, pi/2] uses the kernel's symmetry, which flips sign for
    odd degrees.
    """
    if ell % 2 != 0:
        raise ValueError(f"projection variance requires even ell, got {ell}")
    if ell < 2 or q < 2:
        raise ValueError(f"need ell >= 2 and q >= 2, got {(ell, q)}")
    return (
        2.0
        * math.factorial(q)
        * sphere_measure(d)
        * sphere_measure(d - 1)
        * moment_integral(ell, q, d)
    )


@dataclass(frozen=True)
class MomentResult:
    """One (ell, q, d) moment with its rescaled value and known target."""

    ell: int
    q: int
    d: int
    integral: float
    scaled: float
    target: float
    rel_err: float


def moment_result(ell: int, q: int, d: int) -> MomentResult:
    """Moment integral packaged with the (d, q)-specific rescaling."""
    integral = moment_integral(ell, q, d)
    law = scaling_law(q, d)
    scale = float(ell) ** (-float(law.exponent)) if ell > 0 else 1.0
    if law.log_power == 1 and ell > 1:
        scale /= math.log(ell)
    scaled = integral * scale
    target = law.constant if law.constant is not None else math.nan
    rel = abs(scaled - target) / abs(target) if target and math.isfinite(target) else math.nan
    return MomentResult(ell, q, d, integral, scaled, target, rel)


def constant_sign_probe(q_max: int = 7, d_max: int = 6) -> list[tuple[int, int, float, str]]:
    """Numeric signs of the odd-q constants (reported, never asserted:
    strict positivity for all pairs is an open conjecture)."""
    rows = []
    for d in range(2, d_max + 1):
        for q in range(3, q_max + 1, 2):
            try:
                c = asymptotic_constant(q, d)
                sign = "positive" if c > 0 else ("negative" if c < 0 else "zero")
            except NonConvergedError:
                c, sign = math.nan, "nonconverged"
            rows.append((q, d, c, sign))
    return rows
