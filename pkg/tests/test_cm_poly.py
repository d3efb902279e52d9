import random
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gblab import invariants as inv
from gblab.cm_poly import (DegreePolynomial, compare_pipelines, cm_from_betas, cm_from_pf,
                           involution_I, involution_matrix, numeric_cm_from_betas, pf_from_betas,
                           pf_from_cm)
from gblab.sampler import IntegralEstimate

from conftest import VARIETIES, variety


def DP(*c):
    return DegreePolynomial(c)


def test_cone_instance():
    assert involution_I(DP(2, -2, 2)) == DP(2, 4, 2)
    assert str(DP(2, -2, 2)) == "2 - 2*t + 2*t^2"


def test_constants_fixed():
    for c in (-3, 0, 7):
        assert involution_I(DP(c)) == DP(c)


@pytest.mark.parametrize("betas,pf", [([2, 2, 2], (2, -2, 2)), ([2, 3], (2, -3)),
                                      ([4, 2, 2], (4, -2, 2))])
def test_pf_from_betas(betas, pf):
    assert pf_from_betas(betas) == DP(*pf)


def test_cm_examples():
    assert cm_from_pf(DP(2, -2, 2)) == DP(2, 4, 2)
    assert cm_from_pf(DP(2, -2)) == DP(2, 2)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 5).flatmap(
    lambda n: st.lists(st.integers(-50, 50), min_size=n + 1, max_size=n + 1)))
def test_involution_property(coeffs):
    p = DegreePolynomial(coeffs)
    assert involution_I(involution_I(p)) == p
    assert pf_from_cm(cm_from_pf(p)) == p
    assert involution_I(p).degree == p.degree


@pytest.mark.parametrize("n", range(6))
def test_matrix_is_linear_involution(n):
    M = involution_matrix(n)
    assert np.allclose(M @ M, np.eye(n + 1))
    rnd = random.Random(n)
    c = [rnd.randint(-9, 9) for _ in range(n + 1)]
    assert np.allclose(M @ c, [float(x) for x in involution_I(DegreePolynomial(c)).coeffs])


def _smooth_cm(N, d):
    # deg(c_{n-i} h^i) for a smooth degree-d hypersurface in P^N
    n = N - 1
    s = [sum(comb(N + 1, j) * (-d) ** (k - j) for j in range(k + 1)) for k in range(N)]
    return DegreePolynomial([d * s[n - i] for i in range(n + 1)])


@pytest.mark.parametrize("N,d", [(2, 1), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_smooth_cm_matches_chern_classes(N, d):
    F = None
    betas = [inv.chi_smooth_hypersurface(N - r, d) for r in range(N - 1)] + [d]
    assert cm_from_betas(betas) == _smooth_cm(N, d)


@pytest.mark.parametrize("name", sorted(VARIETIES))
def test_top_coefficient_is_degree(name):
    F, sings = variety(name)
    n = F.num_vars - 2
    betas = [inv.beta_combinatorial(F, sings, r) for r in range(n + 1)]
    cm = cm_from_betas(betas)
    assert cm.coeffs[-1] == F.degree and cm.is_integral()


def test_numeric_propagation():
    mean, err = numeric_cm_from_betas([2.0, 2.0, 2.0], [0.01, 0.02, 0.0])
    assert np.allclose(mean, [2, 4, 2])
    M = involution_matrix(2) * np.array([1, -1, 1])
    assert np.allclose(err, np.sqrt((M ** 2) @ np.array([1e-4, 4e-4, 0])))


def test_compare_pipelines():
    exact = DP(2, 4, 2)
    same = compare_pipelines([(2.0, 0.1), (4.0, 0.1), (2.0, 0.1)], exact)
    assert same.passed and all(r.z == 0 for r in same.rows)
    est = [IntegralEstimate(2.1, 0.02, 1, 1, 0, 0), IntegralEstimate(4.0, 0.1, 1, 1, 0, 0),
           IntegralEstimate(2.0, 0.0, 1, 1, 0, 0)]
    out = compare_pipelines(est, exact, source="crofton")
    assert not out.passed and out.rows[0].z == pytest.approx(5.0) and out.source == "crofton"
    with pytest.raises(ValueError):
        compare_pipelines([(1, 1)], exact)


def test_degree_bounds():
    with pytest.raises(ValueError):
        DegreePolynomial([1, 2, 3], degree=1)
    assert DegreePolynomial([1], degree=2).coeffs == (1, 0, 0)
    with pytest.raises(ValueError):
        DP(Fraction(1, 2)).integers()
