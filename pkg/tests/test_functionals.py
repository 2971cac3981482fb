import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigensphere.field import build_grid, replicate_seed, simulate_s2
from eigensphere.functionals import (
    ChaosCoefficients,
    defect,
    excursion_volume,
    generic_functional,
    hermite_projection,
    indicator_coeffs,
)
from eigensphere.moments import projection_variance
from eigensphere.specfun import gauss_pdf_cdf, hermite_eval, sphere_measure

MU2 = sphere_measure(2)


@pytest.fixture(scope="module")
def grid():
    return build_grid(2, 64)


@pytest.fixture(scope="module")
def sample(grid):
    return simulate_s2(8, grid, 123456)


# --------------------------------------------------------------- coefficients
def test_indicator_coeffs_z0():
    c = indicator_coeffs(0.0)
    phi0 = gauss_pdf_cdf(0.0)[0]
    assert c.coeffs[0] == 0.5  # 1 - Phi(0)
    assert c.coeffs[1] == pytest.approx(phi0, abs=1e-16)
    assert c.coeffs[2] == 0.0  # H_1(0) phi(0): the level kills rank 2
    assert c.rank == 1


def test_indicator_coeffs_z1():
    c = indicator_coeffs(1.0)
    pdf1, cdf1 = gauss_pdf_cdf(1.0)
    assert c.coeffs[0] == pytest.approx(1.0 - cdf1, abs=1e-16)
    assert c.coeffs[2] == pytest.approx(1.0 * pdf1, abs=1e-16)  # H_1(1) phi(1)
    for q in range(1, 9):
        assert c.coeffs[q] == pytest.approx(hermite_eval(q - 1, 1.0) * pdf1, abs=1e-15)


def test_indicator_mean_link(grid):
    # J_0 = 1 - Phi(z) matches the ensemble-mean formula E[S]/mu_d
    for z in (-1.3, 0.0, 0.7, 2.2):
        c = indicator_coeffs(z)
        assert c.coeffs[0] == pytest.approx(1.0 - gauss_pdf_cdf(z)[1], abs=1e-15)


def test_chaos_coefficients_validation():
    with pytest.raises(ValueError):
        ChaosCoefficients((1.0, 0.0))  # truncation below 2
    with pytest.raises(ValueError):
        ChaosCoefficients((0.0, 0.0, 2.0))  # heavy final coefficient
    c = ChaosCoefficients((0.0, 0.0, 2.0, 0.0))
    assert c.truncation == 3 and c.rank == 2
    assert ChaosCoefficients((0.5, 0.0, 0.0, 0.0)).rank is None


# ------------------------------------------------------------------ excursion
def test_excursion_extremes(sample):
    assert excursion_volume(sample, -10.0).value == pytest.approx(MU2, abs=1e-9)
    assert excursion_volume(sample, 10.0).value == 0.0


def test_excursion_centering(sample):
    fv = excursion_volume(sample, 1.0)
    assert fv.kind == "excursion" and fv.param == 1.0
    assert fv.centered == pytest.approx(fv.value - MU2 * (1.0 - gauss_pdf_cdf(1.0)[1]))


def test_excursion_mean_small_ensemble(grid):
    reps = 500
    target = MU2 * (1.0 - gauss_pdf_cdf(1.0)[1])
    vals = np.array(
        [excursion_volume(simulate_s2(8, grid, replicate_seed(2, r)), 1.0).value for r in range(reps)]
    )
    assert abs(vals.mean() - target) <= 3.0 * vals.std(ddof=1) / math.sqrt(reps)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32), z=st.floats(-3, 3))
def test_excursion_range(grid, seed, z):
    fv = excursion_volume(simulate_s2(6, grid, seed), z)
    assert 0.0 <= fv.value <= MU2


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32))
def test_excursion_monotone_in_level(grid, seed):
    s = simulate_s2(6, grid, seed)
    ladder = [excursion_volume(s, z).value for z in np.linspace(-3.5, 3.5, 29)]
    assert all(b <= a for a, b in zip(ladder, ladder[1:]))


# --------------------------------------------------------------------- defect
def test_defect_identity(sample):
    d = defect(sample)
    e0 = excursion_volume(sample, 0.0)
    assert np.all(sample.values != 0.0)
    assert d.value == pytest.approx(2.0 * e0.value - MU2, abs=1e-12)
    assert abs(d.value) <= MU2
    assert d.centered == d.value


def test_defect_mean_zero(grid):
    reps = 600
    vals = np.array([defect(simulate_s2(8, grid, replicate_seed(4, r))).value for r in range(reps)])
    assert abs(vals.mean()) <= 3.0 * vals.std(ddof=1) / math.sqrt(reps)


def test_defect_zero_nodes_contribute_nothing(grid):
    s = simulate_s2(8, grid, 777)
    forced = s.values.copy()
    forced[:100] = 0.0
    patched = type(s)(s.grid, forced, s.ell, s.seed)
    expected = float(np.sum(grid.weights[100:] * np.sign(forced[100:])))
    assert defect(patched).value == pytest.approx(expected, abs=1e-14)


# ---------------------------------------------------------------- projections
def test_projection_base_cases(sample):
    assert hermite_projection(sample, 0).value == pytest.approx(MU2, rel=1e-15)
    assert abs(hermite_projection(sample, 1).value) < 1e-10
    with pytest.raises(ValueError):
        hermite_projection(sample, -1)


def test_projection_variance_matches_formula(grid):
    reps = 3000
    vals = np.array(
        [hermite_projection(simulate_s2(10, grid, replicate_seed(6, r)), 2).value for r in range(reps)]
    )
    target = projection_variance(10, 2, 2)
    se = vals.var(ddof=1) * math.sqrt(2.0 / reps) * 2.0  # generous band
    assert abs(vals.var(ddof=1) - target) <= 3.0 * se


# ------------------------------------------------------------------- generic
def test_generic_single_term(sample):
    coeffs = ChaosCoefficients((0.0, 0.0, 2.0, 0.0))
    assert generic_functional(sample, coeffs).value == pytest.approx(
        hermite_projection(sample, 2).value, rel=1e-12
    )


def test_generic_rank_one_vanishes(sample):
    coeffs = ChaosCoefficients((0.0, 1.0, 0.0, 0.0))
    assert abs(generic_functional(sample, coeffs).value) < 1e-10


def test_generic_rank_undefined(sample):
    with pytest.raises(ValueError):
        generic_functional(sample, ChaosCoefficients((0.3, 0.0, 0.0, 0.0)))


def test_expansion_tracks_excursion(grid):
    # truncated expansion of the level-1 indicator correlates > 0.99 with
    # the centered excursion volume at degree 32
    coeffs = indicator_coeffs(1.0, 8)
    reps = 400
    direct = np.empty(reps)
    expanded = np.empty(reps)
    for r in range(reps):
        s = simulate_s2(32, grid, replicate_seed(9, r))
        direct[r] = excursion_volume(s, 1.0).centered
        expanded[r] = generic_functional(s, coeffs).value
    corr = np.corrcoef(direct, expanded)[0, 1]
    assert corr > 0.99


def test_expansion_l2_error_within_tail_bound():
    # mean-square truncation error is controlled by the computable bound
    # sum_{q > Q} J_q^2 Var[h_q] / q!^2 (evaluated a few orders out); the
    # grid must be fine enough that indicator-quadrature noise (variance
    # ~ (ell/resolution)^3) sits well below that bound
    fine = build_grid(2, 384)
    coeffs = indicator_coeffs(1.0, 8)
    ell, reps = 32, 400
    pdf1 = gauss_pdf_cdf(1.0)[0]
    tail = sum(
        (hermite_eval(q - 1, 1.0) * pdf1) ** 2
        * projection_variance(ell, q, 2)
        / math.factorial(q) ** 2
        for q in range(9, 17)
    )
    errs = np.empty(reps)
    for r in range(reps):
        s = simulate_s2(ell, fine, replicate_seed(9, r))
        errs[r] = excursion_volume(s, 1.0).centered - generic_functional(s, coeffs).value
    # 2x headroom: the bound is truncated at order 16 and the MC has noise
    assert np.mean(errs**2) <= 2.0 * tail
