"""Special functions evaluated by exact recurrences.

Everything downstream (moment integrals, covariance kernels, chaos
coefficients) funnels through this module, so the routines here are kept
dependency-free (numpy only) and are cross-checked in the test suite
against closed forms and scipy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GegenbauerSpec",
    "Multipole",
    "gegenbauer_eval",
    "gegenbauer_batch",
    "hermite_eval",
    "bessel_j",
    "gauss_pdf_cdf",
    "sphere_measure",
]

# |t| may exceed 1 by at most this much (roundoff from inner products).
_T_TOL = 1e-12

# Power series below, large-argument evaluation above.  Accuracy at the
# seam is measured in tests/test_specfun.py; see also the module-level
# notes in BESSEL_SEAM_NOTE.
_BESSEL_SWITCH = 12.0

BESSEL_SEAM_NOTE = (
    "integer orders switch series -> asymptotic at x=12: measured absolute "
    "error is <=1e-12 away from the seam and <=2e-12 in the band 11<x<15 "
    "(the asymptotic series bottoms out near exp(-2x)); half-integer orders "
    "use closed trig forms except x<1 where the series is exact instead."
)


def sphere_measure(d: int) -> float:
    """Surface measure of the unit d-sphere, 2*pi^((d+1)/2)/Gamma((d+1)/2)."""
    if d < 1:
        raise ValueError(f"sphere dimension must be >= 1, got {d}")
    return 2.0 * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)


def _jacobi_normalizer(ell: int, d: int) -> float:
    """binomial(ell + d/2 - 1, ell); generalized via log-Gamma for odd d."""
    if d % 2 == 0:
        return float(math.comb(ell + d // 2 - 1, ell))
    # odd d: Gamma(ell + d/2) / (Gamma(ell + 1) * Gamma(d/2)), kept in log
    # space so large ell cannot overflow
    return math.exp(
        math.lgamma(ell + d / 2) - math.lgamma(ell + 1) - math.lgamma(d / 2)
    )


@dataclass(frozen=True)
class GegenbauerSpec:
    """Degree/dimension pair for the normalized covariance polynomial.

    ``alpha`` is the value of the underlying Jacobi polynomial at 1, i.e.
    the normalization constant making the kernel equal 1 at argument 1.
    """

    ell: int
    d: int
    alpha: float = field(init=False)

    def __post_init__(self):
        if self.ell < 0:
            raise ValueError(f"degree must be >= 0, got {self.ell}")
        if self.d < 2:
            raise ValueError(f"sphere dimension must be >= 2, got {self.d}")
        object.__setattr__(self, "alpha", _jacobi_normalizer(self.ell, self.d))

    def __call__(self, t):
        return gegenbauer_eval(self, t)


@dataclass(frozen=True)
class Multipole:
    """Multipole index with its Laplace-Beltrami eigenvalue l*(l+d-1)."""

    ell: int
    d: int

    def __post_init__(self):
        if self.ell < 0:
            raise ValueError(f"degree must be >= 0, got {self.ell}")
        if self.d < 2:
            raise ValueError(f"sphere dimension must be >= 2, got {self.d}")

    @property
    def eigenvalue(self) -> int:
        return self.ell * (self.ell + self.d - 1)

    @property
    def parity(self) -> str:
        return "even" if self.ell % 2 == 0 else "odd"


def _check_argument(t: np.ndarray) -> np.ndarray:
    if np.any(np.abs(t) > 1.0 + _T_TOL):
        bad = np.max(np.abs(t))
        raise ValueError(f"argument out of [-1, 1]: |t| = {bad}")
    return np.clip(t, -1.0, 1.0)


def _jacobi_ratio_last(ell: int, d: int, t: np.ndarray) -> np.ndarray:
    """P_ell^(a,a)(t) / P_ell^(a,a)(1) with a = d/2 - 1, by the three-term
    recurrence in the degree.

    The value at 1 is carried through the same recurrence (not taken from
    the binomial formula), so the ratio is exactly 1 at t = 1 regardless
    of any Gamma-function error for odd d.  Rolling storage: only the two
    previous degrees are kept, which lets the moment quadratures evaluate
    tens of thousands of nodes without materializing all degrees.
    """
    a = d / 2.0 - 1.0
    if ell == 0:
        return np.ones_like(t)
    p_prev = np.ones_like(t)
    p_curr = (a + 1.0) * t
    one_prev, one_curr = 1.0, a + 1.0
    s = 2.0 * a
    for n in range(2, ell + 1):
        c1 = 2.0 * n * (n + s) * (2.0 * n + s - 2.0)
        c2 = (2.0 * n + s - 1.0) * (2.0 * n + s) * (2.0 * n + s - 2.0)
        c3 = 2.0 * (n + a - 1.0) ** 2 * (2.0 * n + s)
        p_next = (c2 * t * p_curr - c3 * p_prev) / c1
        one_next = (c2 * one_curr - c3 * one_prev) / c1
        p_prev, p_curr = p_curr, p_next
        one_prev, one_curr = one_curr, one_next
        if one_curr > 1e290:  # rescale both rows; the recurrence is linear
            p_prev = p_prev / one_curr
            p_curr = p_curr / one_curr
            one_prev = one_prev / one_curr
            one_curr = 1.0
    return p_curr / one_curr


def gegenbauer_eval(spec: GegenbauerSpec, t):
    """Normalized Gegenbauer polynomial of the spec's degree at t in [-1,1].

    Accepts scalars or arrays; relative error grows like ell * eps.
    """
    arr = _check_argument(np.asarray(t, dtype=float))
    out = _jacobi_ratio_last(spec.ell, spec.d, np.atleast_1d(arr))
    return float(out[0]) if arr.ndim == 0 else out


def gegenbauer_eval_many(ell: int, d: int, t: np.ndarray) -> np.ndarray:
    """Degree-ell values on an array of arguments (quadrature fast path)."""
    return _jacobi_ratio_last(ell, d, _check_argument(np.asarray(t, dtype=float)))


def gegenbauer_batch(spec_max: GegenbauerSpec, t: float) -> np.ndarray:
    """All degrees 0..ell at a single argument, one recurrence pass."""
    tt = float(_check_argument(np.asarray(t, dtype=float)))
    ell, d = spec_max.ell, spec_max.d
    a = d / 2.0 - 1.0
    s = 2.0 * a
    out = np.empty(ell + 1)
    out[0] = 1.0
    if ell == 0:
        return out
    p_prev, p_curr = 1.0, (a + 1.0) * tt
    one_prev, one_curr = 1.0, a + 1.0
    out[1] = p_curr / one_curr
    for n in range(2, ell + 1):
        c1 = 2.0 * n * (n + s) * (2.0 * n + s - 2.0)
        c2 = (2.0 * n + s - 1.0) * (2.0 * n + s) * (2.0 * n + s - 2.0)
        c3 = 2.0 * (n + a - 1.0) ** 2 * (2.0 * n + s)
        p_prev, p_curr = p_curr, (c2 * tt * p_curr - c3 * p_prev) / c1
        one_prev, one_curr = one_curr, (c2 * one_curr - c3 * one_prev) / c1
        out[n] = p_curr / one_curr
        if one_curr > 1e290:
            p_prev /= one_curr
            p_curr /= one_curr
            one_prev /= one_curr
            one_curr = 1.0
    return out


def hermite_eval(q: int, t):
    """Probabilists' Hermite H_q via H_{q+1} = t H_q - q H_{q-1}.

    No scaling is applied; q stays small (<= ~12) in every experiment so
    the values remain well inside double range.
    """
    if q < 0:
        raise ValueError(f"Hermite order must be >= 0, got {q}")
    arr = np.asarray(t, dtype=float)
    h_prev = np.ones_like(arr)
    if q == 0:
        return float(h_prev) if arr.ndim == 0 else h_prev
    h_curr = arr.copy()
    for k in range(1, q):
        h_prev, h_curr = h_curr, arr * h_curr - k * h_prev
    return float(h_curr) if arr.ndim == 0 else h_curr


def hermite_ladder(qmax: int, t: np.ndarray) -> np.ndarray:
    """H_0..H_qmax stacked along axis 0 (single pass, shared by expansions)."""
    arr = np.asarray(t, dtype=float)
    out = np.empty((qmax + 1,) + arr.shape)
    out[0] = 1.0
    if qmax >= 1:
        out[1] = arr
    for k in range(1, qmax):
        out[k + 1] = arr * out[k] - k * out[k - 1]
    return out


def _bessel_series(nu: float, x: np.ndarray) -> np.ndarray:
    """Ascending series, any order nu >= 0; accurate for x <= ~12."""
    out = np.zeros_like(x)
    nz = x > 0
    # leading term (x/2)^nu / Gamma(nu+1) in log space to dodge under/overflow
    half = 0.5 * x[nz]
    term = np.exp(nu * np.log(half) - math.lgamma(nu + 1.0))
    acc = term.copy()
    hh = half * half
    for k in range(1, 200):
        term = term * (-hh) / (k * (nu + k))
        acc += term
        if np.all(np.abs(term) <= 1e-18 * (1.0 + np.abs(acc))):
            break
    out[nz] = acc
    if np.any(~nz):
        out[~nz] = 1.0 if nu == 0.0 else 0.0
    return out


def _bessel_asymptotic_int(n: int, x: np.ndarray) -> np.ndarray:
    """Hankel large-argument expansion for integer order, x > ~12.

    P/Q sums are truncated at their smallest term; the attainable error
    bottoms out around exp(-2x).
    """
    mu = 4.0 * n * n
    inv8x = 1.0 / (8.0 * x)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones_like(x, dtype=bool)
    for k in range(1, 60):
        term = term * (mu - (2.0 * k - 1.0) ** 2) / k * inv8x
        contrib = np.where(active, term, 0.0)
        if k % 2 == 1:
            q += np.where(k % 4 == 1, contrib, -contrib)
        else:
            p += np.where(k % 4 == 0, contrib, -contrib)
        # freeze lanes whose terms started growing (past the optimal cut)
        if k > 2:
            active &= np.abs(term) < np.abs(prev_term)
        prev_term = term.copy()
        if not np.any(active):
            break
    chi = x - (0.5 * n + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _bessel_halfint_trig(nu: float, x: np.ndarray) -> np.ndarray:
    """Closed trigonometric forms for half-integer order (upward recurrence
    from J_{-1/2}, J_{1/2}); stable here because x > nu in this branch."""
    pref = np.sqrt(2.0 / (math.pi * x))
    j_minus = pref * np.cos(x)  # J_{-1/2}
    j = pref * np.sin(x)  # J_{+1/2}
    order = 0.5
    while order < nu:
        j_minus, j = j, (2.0 * order / x) * j - j_minus
        order += 1.0
    return j


def bessel_j(nu: float, x):
    """Bessel J_nu for nu a nonnegative integer or half-integer, x >= 0."""
    two_nu = 2.0 * nu
    if nu < 0 or two_nu != int(two_nu):
        raise ValueError(f"order must be a nonnegative half-integer, got {nu}")
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr < 0):
        raise ValueError("bessel_j requires x >= 0")
    out = np.empty_like(arr)
    # half-integer orders: closed trigonometric forms except near 0, where
    # the upward recurrence cancels and the series is exact instead
    small = arr <= (_BESSEL_SWITCH if float(nu).is_integer() else 1.0)
    if np.any(small):
        out[small] = _bessel_series(float(nu), arr[small])
    if np.any(~small):
        big = arr[~small]
        if float(nu).is_integer():
            out[~small] = _bessel_asymptotic_int(int(nu), big)
        else:
            out[~small] = _bessel_halfint_trig(float(nu), big)
    return float(out[0]) if scalar else out


def bessel_j_derivative(nu: float, x):
    """J_nu'(x) = (nu/x) J_nu(x) - J_{nu+1}(x) (used by zero refinement)."""
    arr = np.asarray(x, dtype=float)
    if nu == 0.0:
        return -bessel_j(1.0, arr)
    return (nu / arr) * bessel_j(nu, arr) - bessel_j(nu + 1.0, arr)


_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def gauss_pdf_cdf(z: float) -> tuple[float, float]:
    """Standard Gaussian density and distribution function at z.

    The cdf goes through erfc so both tails keep full absolute accuracy.
    """
    zf = float(z)
    pdf = _INV_SQRT_2PI * math.exp(-0.5 * zf * zf)
    cdf = 0.5 * math.erfc(-zf / _SQRT2)
    return pdf, cdf


def gauss_cdf_array(z: np.ndarray) -> np.ndarray:
    """Vectorized Phi(z) (erfc-based, loop kept in C via frompyfunc)."""
    out = np.frompyfunc(math.erfc, 1, 1)(-np.asarray(z, dtype=float) / _SQRT2)
    return 0.5 * out.astype(float)
