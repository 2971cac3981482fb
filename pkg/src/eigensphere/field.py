"""Sampling of single-multipole Gaussian fields on discretized spheres.

d = 2 uses exact harmonic synthesis on a product quadrature grid (cost
O(N*ell) per draw, no covariance factorization).  d >= 3 uses a dense
Cholesky-type factorization of the covariance matrix on a quasi-uniform
node set, which is viable at desk scale (N <= 6000) and sidesteps
hyperspherical harmonic recurrences entirely.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .specfun import Multipole, gegenbauer_eval_many, sphere_measure

__all__ = [
    "SphereGrid",
    "FieldSample",
    "GridTooLargeError",
    "FactorizationError",
    "build_grid",
    "simulate",
    "simulate_s2",
    "simulate_sd",
    "replicate_seed",
    "dump_field",
    "load_field",
]

DENSE_NODE_BUDGET = 6000
_JITTER_REL = 1e-10


class GridTooLargeError(ValueError):
    """Node count exceeds the dense factorization budget."""


class FactorizationError(RuntimeError):
    """Jittered covariance matrix was not numerically positive semidefinite."""


@dataclass(eq=False)
class SphereGrid:
    """Quadrature nodes on S^d: unit vectors with positive weights summing
    to the surface measure."""

    d: int
    nodes: np.ndarray  # (N, d+1)
    weights: np.ndarray  # (N,)
    kind: str  # "product" (d=2) | "quasi-uniform" (d>=3)
    cos_colat: np.ndarray | None = None  # product grids: GL nodes in cos(theta)
    longitudes: np.ndarray | None = None  # product grids: uniform phi
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    def geodesic_from(self, point: np.ndarray) -> np.ndarray:
        """arccos of the inner products against one unit vector."""
        return np.arccos(np.clip(self.nodes @ np.asarray(point), -1.0, 1.0))


@dataclass(frozen=True)
class FieldSample:
    """One realization of the degree-ell field on a grid, with provenance."""

    grid: SphereGrid
    values: np.ndarray
    ell: Multipole
    seed: int


def replicate_seed(master_seed: int, index: int) -> int:
    """64-bit stream key for one replicate, hashed from (master, index) so
    ensembles are order-independent and reproducible."""
    ss = np.random.SeedSequence((int(master_seed), int(index)))
    return int(ss.generate_state(1, np.uint64)[0])


def _rng_for(seed: int) -> np.random.Generator:
    # Philox is counter-based: streams for distinct keys never collide
    return np.random.Generator(np.random.Philox(key=int(seed)))


def build_grid(d: int, resolution: int) -> SphereGrid:
    """Quadrature grid on S^d.

    d = 2: Gauss-Legendre nodes in cos(theta) (``resolution`` of them)
    crossed with 2*resolution uniform longitudes; weights are the GL
    weights times 2*pi/(2*resolution).  Exact for spherical polynomials of
    degree <= 2*resolution - 1.

    d >= 3: Kronecker low-discrepancy sequence of resolution^2 points in
    the unit cube mapped to hyperspherical angles by inverting each
    sin-power marginal; equal weights mu_d / N.
    """
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    if resolution < 4:
        raise ValueError(f"resolution must be >= 4, got {resolution}")
    if d == 2:
        x, w = np.polynomial.legendre.leggauss(resolution)
        m = 2 * resolution
        phi = 2.0 * math.pi * np.arange(m) / m
        sin_t = np.sqrt(1.0 - x * x)
        nodes = np.empty((resolution * m, 3))
        nodes[:, 0] = np.repeat(sin_t, m) * np.tile(np.cos(phi), resolution)
        nodes[:, 1] = np.repeat(sin_t, m) * np.tile(np.sin(phi), resolution)
        nodes[:, 2] = np.repeat(x, m)
        weights = np.repeat(w, m) * (2.0 * math.pi / m)
        return SphereGrid(2, nodes, weights, "product", cos_colat=x, longitudes=phi)
    n = resolution * resolution
    u = _kronecker_sequence(n, d)
    nodes = _angles_to_sphere(u, d)
    weights = np.full(n, sphere_measure(d) / n)
    return SphereGrid(d, nodes, weights, "quasi-uniform")


def _kronecker_sequence(n: int, dims: int) -> np.ndarray:
    """Rank-1 lattice points frac(0.5 + i * alpha) with alpha built from the
    generalized golden ratio (positive root of x^(dims+1) = x + 1)."""
    phi = 1.5
    for _ in range(64):
        phi = phi - (phi ** (dims + 1) - phi - 1.0) / ((dims + 1) * phi**dims - 1.0)
    alpha = (1.0 / phi) ** np.arange(1, dims + 1)
    i = np.arange(1, n + 1)[:, None]
    return np.mod(0.5 + i * alpha, 1.0)


def _sin_power_cdf(theta: np.ndarray, k: int) -> np.ndarray:
    """int_0^theta sin^k, by the stable reduction formula."""
    if k == 0:
        return theta
    if k == 1:
        return 1.0 - np.cos(theta)
    return (
        -np.cos(theta) * np.sin(theta) ** (k - 1) + (k - 1) * _sin_power_cdf(theta, k - 2)
    ) / k


def _invert_sin_power(u: np.ndarray, k: int) -> np.ndarray:
    """theta in [0, pi] with normalized int_0^theta sin^k = u (bisection;
    the CDF is monotone and cheap, so 60 halvings reach roundoff)."""
    total = _sin_power_cdf(np.pi, k)
    lo = np.zeros_like(u)
    hi = np.full_like(u, np.pi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = _sin_power_cdf(mid, k) < u * total
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _angles_to_sphere(u: np.ndarray, d: int) -> np.ndarray:
    """Map unit-cube points to S^d: d-1 polar angles plus one azimuth."""
    n = len(u)
    nodes = np.empty((n, d + 1))
    sin_prod = np.ones(n)
    for j in range(d - 1):
        theta = _invert_sin_power(u[:, j], d - 1 - j)
        nodes[:, j] = sin_prod * np.cos(theta)
        sin_prod = sin_prod * np.sin(theta)
    phi = 2.0 * math.pi * u[:, d - 1]
    nodes[:, d - 1] = sin_prod * np.cos(phi)
    nodes[:, d] = sin_prod * np.sin(phi)
    return nodes


def _legendre_table(ell: int, x: np.ndarray) -> np.ndarray:
    """4pi-normalized associated Legendre values p(m, i) for m = 0..ell at
    the colatitude cosines x; satisfies sum_m p^2 = 2*ell + 1 pointwise.

    Sectoral seed then upward recurrence in the degree for each order;
    this is the standard stable direction.
    """
    n = len(x)
    u = np.sqrt(np.clip(1.0 - x * x, 0.0, 1.0))
    out = np.empty((ell + 1, n))
    if ell == 0:
        out[0] = 1.0
        return out
    pmm = np.ones(n)
    for m in range(ell + 1):
        if m == 1:
            pmm = math.sqrt(3.0) * u
        elif m > 1:
            pmm = pmm * u * math.sqrt((2.0 * m + 1.0) / (2.0 * m))
        if m == ell:
            out[m] = pmm
            break
        p_prev = pmm
        p_curr = x * math.sqrt(2.0 * m + 3.0) * pmm
        for deg in range(m + 2, ell + 1):
            a = math.sqrt((2.0 * deg - 1.0) * (2.0 * deg + 1.0) / ((deg - m) * (deg + m)))
            b = math.sqrt(
                (2.0 * deg + 1.0)
                * (deg + m - 1.0)
                * (deg - m - 1.0)
                / ((deg - m) * (deg + m) * (2.0 * deg - 3.0))
            )
            p_prev, p_curr = p_curr, a * x * p_curr - b * p_prev
        out[m] = p_curr
    return out


def _synthesis_tables(grid: SphereGrid, ell: int):
    """Cached per-(grid, ell) pieces of the harmonic synthesis: the scaled
    Legendre table and the longitude trig tables."""
    key = ("synth", ell)
    if key not in grid._cache:
        a = _legendre_table(ell, grid.cos_colat) / math.sqrt(2.0 * ell + 1.0)
        m = np.arange(ell + 1)[:, None]
        cos_t = np.cos(m * grid.longitudes[None, :])
        sin_t = np.sin(m * grid.longitudes[None, :])
        grid._cache[key] = (a, cos_t, sin_t)
    return grid._cache[key]


def simulate_s2(ell: int, grid: SphereGrid, seed: int) -> FieldSample:
    """Exact harmonic synthesis of the degree-ell field on a product grid.

    Draws 2*ell + 1 independent N(0,1) coefficients on the real
    orthonormal harmonic basis (equal in law to the complex-coefficient
    convention with a_{l,-m} = (-1)^m conj(a_{lm})); by the addition
    theorem the node covariance is exactly the degree-ell Legendre
    polynomial of the cosine of geodesic distance, and pointwise variance
    is exactly 1.
    """
    if grid.d != 2 or grid.kind != "product":
        raise ValueError(f"simulate_s2 needs a d=2 product grid, got d={grid.d}")
    a, cos_t, sin_t = _synthesis_tables(grid, ell)
    g = _rng_for(seed).standard_normal(2 * ell + 1)
    gc = np.empty(ell + 1)
    gs = np.zeros(ell + 1)
    gc[0] = g[0]
    if ell >= 1:
        gc[1:] = g[1::2]
        gs[1:] = g[2::2]
    values = ((a * gc[:, None]).T @ cos_t + (a * gs[:, None]).T @ sin_t).ravel()
    return FieldSample(grid, values, Multipole(ell, 2), seed)


def _dense_factor(grid: SphereGrid, ell: int) -> np.ndarray:
    key = ("chol", ell)
    if key not in grid._cache:
        n = grid.size
        if n > DENSE_NODE_BUDGET:
            raise GridTooLargeError(
                f"{n} nodes exceeds the dense factorization budget {DENSE_NODE_BUDGET}"
            )
        gram = np.clip(grid.nodes @ grid.nodes.T, -1.0, 1.0)
        cov = gegenbauer_eval_many(ell, grid.d, gram.ravel()).reshape(n, n)
        jitter = _JITTER_REL * np.trace(cov) / n
        cov[np.diag_indices(n)] += jitter
        try:
            grid._cache[key] = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise FactorizationError(
                f"covariance factorization failed for ell={ell}, d={grid.d}, N={n}"
            ) from exc
    return grid._cache[key]


def simulate_sd(ell: int, grid: SphereGrid, seed: int) -> FieldSample:
    """General-d sampling through the cached covariance factor: values =
    L z with L L^T = [G(<x_i, x_j>)] + jitter I and z i.i.d. N(0,1)."""
    factor = _dense_factor(grid, ell)
    z = _rng_for(seed).standard_normal(grid.size)
    return FieldSample(grid, factor @ z, Multipole(ell, grid.d), seed)


def simulate(ell: int, grid: SphereGrid, seed: int) -> FieldSample:
    """Dispatch to the harmonic route on S^2, dense factorization above."""
    if grid.d == 2:
        return simulate_s2(ell, grid, seed)
    return simulate_sd(ell, grid, seed)


# Binary dump layout: 8-byte little-endian header (d: u16, ell: u16, N: u32)
# followed by N node-ordered float64 values.
_HEADER = struct.Struct("<HHI")


def dump_field(sample: FieldSample, path) -> None:
    """Write the sample for external visualization (format above)."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(sample.grid.d, sample.ell.ell, len(sample.values)))
        fh.write(np.ascontiguousarray(sample.values, dtype="<f8").tobytes())


def load_field(path) -> tuple[int, int, np.ndarray]:
    """Read a dump back as (d, ell, values)."""
    with open(path, "rb") as fh:
        d, ell, n = _HEADER.unpack(fh.read(_HEADER.size))
        values = np.frombuffer(fh.read(8 * n), dtype="<f8")
        if len(values) != n:
            raise ValueError(f"truncated field dump: expected {n} values, got {len(values)}")
    return d, ell, values.copy()
