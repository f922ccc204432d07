"""Closed-form elasticities. Expected values were computed with exact
rational arithmetic (fractions.Fraction) and frozen here."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elasticast.core import (BundleSystem, ElasticityError, ElasticityInputs,
                             cross_price_elasticity, divisia_indices, frisch_deflator,
                             full_matrix, marginal_share, own_price, own_price_elasticity,
                             parabola_roots)


@pytest.mark.parametrize("rho, omega, eps, expected", [
    (-1.26, 0.05, 1.0, -0.803968253968254),
    (-1.26, 0.05, 1.5, -1.1761904761904762),
    (-1.0, 0.3, 1.0, -1.0),
    (-1.0, 0.05, 1.0, -1.0),
])
def test_own_price_examples(rho, omega, eps, expected):
    assert own_price_elasticity(ElasticityInputs(rho, omega, eps)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("rho, omega", [(-1.26, 0.05), (-0.3, 1.0), (-5.0, 0.7)])
def test_own_price_zero_income_elasticity(rho, omega):
    assert own_price(0.0, omega, rho) == 0


def test_own_price_matches_rational_oracle():
    rng = np.random.default_rng(7)
    for _ in range(200):
        rho, omega, eps = -rng.uniform(0.2, 3), rng.uniform(1e-4, 1), rng.uniform(-2, 4)
        r, w, e = Fraction(rho), Fraction(omega), Fraction(eps)
        exact = -w * e * e / r + (1 / r - w) * e
        assert own_price(eps, omega, rho) == pytest.approx(float(exact), rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("bad", [
    dict(rho=0.0, omega=0.05, epsilon=1.0),
    dict(rho=0.5, omega=0.05, epsilon=1.0),
    dict(rho=-1.0, omega=0.0, epsilon=1.0),
    dict(rho=-1.0, omega=1.5, epsilon=1.0),
    dict(rho=-1.0, omega=0.05, epsilon=math.nan),
    dict(rho=-math.inf, omega=0.05, epsilon=1.0),
])
def test_inputs_rejected(bad):
    with pytest.raises(ElasticityError):
        ElasticityInputs(**bad)


def test_inferior_good_admitted():
    # Giffen-like sign for a negative income elasticity
    assert own_price(-0.5, 0.1, -1.26) == pytest.approx(0.4666666666666667, abs=1e-15)


@pytest.mark.parametrize("ea, eb, wb, rho, expected", [
    (1.0, 0.2, 0.05, -1.26, -0.04206349206349207),
    (0.0, 3.0, 0.4, -0.7, 0.0),
    (1.0, 1.26, 0.05, -1.26, 0.0),
    (1.0, 1.0, 0.3, -1.0, 0.0),
])
def test_cross_price_examples(ea, eb, wb, rho, expected):
    assert cross_price_elasticity(ea, eb, wb, rho) == pytest.approx(expected, abs=1e-16)


def test_cross_price_zero_crossing_is_exact():
    assert cross_price_elasticity(1.0, 1.26, 0.05, -1.26) == 0.0
    assert math.copysign(1, cross_price_elasticity(1.0, 1.26, 0.05, -1.26)) == 1


def test_cross_price_not_symmetric():
    assert cross_price_elasticity(1.5, 0.5, 0.2, -1.26) != cross_price_elasticity(0.5, 1.5, 0.2, -1.26)


@given(ea=st.floats(1e-3, 5), wb=st.floats(1e-4, 1), rho=st.floats(-3, -0.1),
       rel=st.floats(1e-9, 0.9))
def test_sign_law(ea, wb, rho, rel):
    below = cross_price_elasticity(ea, abs(rho) * (1 - rel), wb, rho)
    above = cross_price_elasticity(ea, abs(rho) * (1 + rel), wb, rho)
    assert below < 0 < above
    assert cross_price_elasticity(ea, -rho, wb, rho) == 0.0


@given(rho=st.floats(-1.56, -0.96), omega=st.floats(1e-6, 0.1),
       eps=st.floats(1e-6, 2.0))
def test_negativity_region(rho, omega, eps):
    assert own_price(eps, omega, rho) < 0


@given(rho=st.floats(-3, -0.2), omega=st.floats(1e-3, 1))
def test_parabola_roots(rho, omega):
    r0, r1 = parabola_roots(omega, rho)
    assert own_price(r0, omega, rho) == 0
    scale = max(1.0, r1 * r1 * omega / abs(rho))
    assert abs(own_price(r1, omega, rho)) <= 1e-13 * scale


def test_marginal_share():
    assert marginal_share(0.05, 1) == 0.05
    assert marginal_share(0.04, 1.5) == pytest.approx(0.06, abs=1e-17)
    assert marginal_share(0.2, 0) == 0
    with pytest.raises(ElasticityError):
        marginal_share(math.inf, 1)


def test_frisch_deflator():
    assert frisch_deflator([0.5, 0.5], [0.02, 0.0]) == pytest.approx(0.01, abs=1e-17)
    assert frisch_deflator([1.0], [0.037]) == 0.037
    assert frisch_deflator([0.3, 0.7], [0.01, -0.01]) == pytest.approx(-0.004, abs=1e-17)
    with pytest.raises(ElasticityError, match="length"):
        frisch_deflator([0.5, 0.5], [0.01])
    with pytest.raises(ElasticityError, match="residual"):
        frisch_deflator([0.5, 0.6], [0.01, 0.01])


def test_divisia_indices():
    assert divisia_indices([0.5, 0.5], [0.02, 0.02], [0, 0]) == pytest.approx((0.02, 0.0))
    assert divisia_indices([0.3, 0.7], [0, 0], [0.01, 0.01]) == pytest.approx((0.0, 0.01))
    assert divisia_indices([0.25, 0.75], [0.04, 0], [0, 0.02]) == pytest.approx((0.01, 0.015))
    with pytest.raises(ElasticityError):
        divisia_indices([0.25, 0.75], [0.04], [0, 0.02])
    with pytest.raises(ElasticityError):
        divisia_indices([0.2, 0.75], [0.04, 0], [0, 0.02])


def test_matrix_two_bundles():
    m = full_matrix(BundleSystem([0.3, 0.7], [1.5, 11 / 14], -1.26)).values
    expected = [[-1.1047619047619048, -0.3952380952380952],
                [0.044897959183673466, -0.8306122448979592]]
    np.testing.assert_allclose(m, expected, rtol=0, atol=1e-15)
    np.testing.assert_allclose(m.sum(axis=1), [-1.5, -11 / 14], atol=1e-15)
    assert 0.3 * m[0, 0] + 0.7 * m[1, 0] == pytest.approx(-0.3, abs=1e-15)


def test_matrix_cobb_douglas():
    m = full_matrix(BundleSystem([0.5, 0.5], [1, 1], -1.0)).values
    np.testing.assert_array_equal(m, [[-1, 0], [0, -1]])


def test_matrix_zero_row():
    system = BundleSystem([0.2, 0.3, 0.5], [0.0, 1.0, 1.4], -1.26)
    m = full_matrix(system).values
    assert np.all(m[0] == 0)


def test_matrix_entries_match_standalone_maps():
    system = BundleSystem([0.1, 0.2, 0.7], [0.5, 2.0, 1.0 / 0.7 * (1 - 0.05 - 0.4)], -1.1)
    m = full_matrix(system).values
    for i in range(3):
        for j in range(3):
            if i == j:
                want = own_price(system.epsilons[i], system.shares[i], system.rho)
            else:
                want = cross_price_elasticity(system.epsilons[i], system.epsilons[j],
                                              system.shares[j], system.rho)
            assert m[i, j] == want


def test_matrix_labels_and_immutability():
    m = full_matrix(BundleSystem([0.5, 0.5], [1, 1], -1.0, ("food", "other")))
    assert m.labels == ("food", "other")
    with pytest.raises(ValueError):
        m.values[0, 0] = 1.0


@pytest.mark.parametrize("shares, eps, match", [
    ([0.5, 0.6], [1, 1], "budget shares"),
    ([0.5, 0.5], [1, 1.1], "Engel"),
    ([1.0], [1.0], "two bundles"),
    ([0.5, 0.5], [1.0], "length"),
])
def test_bundle_system_rejects(shares, eps, match):
    with pytest.raises(ElasticityError, match=match):
        BundleSystem(shares, eps, -1.26)


def test_bundle_system_two_level_tolerance(caplog):
    BundleSystem([0.5, 0.5 + 5e-10], [1, 1 - 5e-10], -1.26)
    assert not caplog.records
    with caplog.at_level("INFO", logger="elasticast.core"):
        BundleSystem([0.5, 0.5 + 5e-8], [1, 1 - 5e-8], -1.26)
    assert any("rounding noise" in r.message for r in caplog.records)
    with pytest.raises(ElasticityError, match="residual"):
        BundleSystem([0.5, 0.5 + 5e-6], [1, 1], -1.26)


def test_bundle_system_does_not_freeze_caller_arrays():
    shares = np.array([0.5, 0.5])
    BundleSystem(shares, [1.0, 1.0], -1.0)
    shares[0] = 0.4


def random_system(rng, n):
    shares = rng.dirichlet(np.ones(n))
    eps = rng.uniform(-0.5, 3.0, n)
    eps = eps / float(shares @ eps)
    return BundleSystem(shares, eps, -rng.uniform(0.3, 3.0))


@settings(max_examples=200)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 10))
def test_aggregation_identities(seed, n):
    rng = np.random.default_rng(seed)
    try:
        system = random_system(rng, n)
    except ElasticityError:
        return  # a near-zero Engel sum blew the normalization up
    m = full_matrix(system)
    assert np.max(np.abs(m.row_residuals(system.epsilons))) <= 1e-10
    assert np.max(np.abs(m.column_residuals(system.shares))) <= 1e-10
    diag = [own_price(e, w, system.rho) for e, w in zip(system.epsilons, system.shares)]
    np.testing.assert_allclose(np.diag(m.values), diag, rtol=0, atol=1e-14)
