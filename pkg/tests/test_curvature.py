import dataclasses

import numpy as np
import pytest

from gblab.algebra import AffineMap, linear_substitute, parse_polynomial
from gblab.curvature import (ChernIntegrand, DegreeError, ExteriorForm, Hypersurface, MAX_DIM,
                             SmoothnessError, all_chern_forms, chern_curvature, chern_form,
                             density, frame_curvature, gauss_bonnet_integrand, jet_density_ratio,
                             kahler_form, mather_degree_integrand,
                             pfaffian_crosscheck, pullback_metric)
from gblab.curvature.forms import lowered_curvature

from conftest import random_points, variety

LINE = parse_polynomial("x2", 3)


def test_line_metric_at_origin():
    m = pullback_metric(LINE, [1, 0, 0], chart=0)
    assert m.g.shape == (1, 1)
    assert m.g[0, 0] == pytest.approx(1.0)
    assert m.vol_density == pytest.approx(1.0)


def test_line_metric_at_unit_modulus():
    m = pullback_metric(LINE, [1, np.exp(0.7j), 0], chart=0)
    assert m.g[0, 0].real == pytest.approx(0.25)


def test_line_curvature_and_densities():
    m = pullback_metric(LINE, [1, 0, 0], chart=0)
    th = chern_curvature(m)
    assert th.R[0, 0, 0, 0] == pytest.approx(2.0)
    c = all_chern_forms(th)
    assert density([c[1]]) == pytest.approx(2 / np.pi)
    assert density([kahler_form(m)]) == pytest.approx(1 / np.pi)
    assert pfaffian_crosscheck(th, m) == pytest.approx(2 / np.pi)
    assert density([c[0], c[1]]) == pytest.approx(density([c[1]]))


def test_chern_form_degree_bounds():
    m = pullback_metric(LINE, [1, 0.3, 0], chart=0)
    th = chern_curvature(m)
    assert np.allclose(chern_form(th, 0).coeffs, ExteriorForm.one(1).coeffs)
    assert not np.any(chern_form(th, 2).coeffs)
    w = kahler_form(m)
    assert not np.any(w.wedge(w).coeffs)
    with pytest.raises(DegreeError):
        density([w, w])


def test_scale_invariance_of_curvature():
    F, _ = variety("quadric")
    p = random_points(F, 1, seed=4)[0]
    m = pullback_metric(F, p)
    m2 = dataclasses.replace(m, g=7.5 * m.g, dg=7.5 * m.dg, ddg=7.5 * m.ddg)
    R1, R2 = chern_curvature(m).R, chern_curvature(m2).R
    assert np.max(np.abs(R1 - R2)) <= 1e-12 * np.max(np.abs(R1))


def test_singular_point_rejected():
    F, sings = variety("nodal_cubic")
    with pytest.raises(SmoothnessError):
        pullback_metric(F, [complex(x) for x in sings[0]])


@pytest.mark.parametrize("name", ["conic", "cubic", "quadric", "nodal_cubic", "cone"])
def test_kahler_symmetries_and_reality(name):
    F, _ = variety(name)
    for p in random_points(F, 100, seed=1):
        m = pullback_metric(F, p)
        assert m.kahler_defect() < 1e-9
        assert m.min_eigenvalue > 0
        th = chern_curvature(m)
        Rl = lowered_curvature(th.R, m.g)
        scale = np.max(np.abs(Rl))
        assert np.max(np.abs(Rl - Rl.transpose(2, 1, 0, 3))) < 1e-9 * scale
        assert np.max(np.abs(Rl - Rl.transpose(0, 3, 2, 1))) < 1e-9 * scale
        for c in all_chern_forms(th):
            assert c.is_real_type(1e-9)


@pytest.mark.parametrize("name", ["conic", "quadric", "cuspidal_cubic"])
def test_pfaffian_agrees_with_chern_path(name):
    F, _ = variety(name)
    n = F.num_vars - 2
    for p in random_points(F, 50, seed=2):
        m = pullback_metric(F, p)
        th = chern_curvature(m)
        top = density([all_chern_forms(th)[n]])
        assert pfaffian_crosscheck(th, m) == pytest.approx(top, rel=1e-9, abs=1e-12)


INTEGRANDS = {1: [ChernIntegrand((1,)), ChernIntegrand((), 1)],
              2: [ChernIntegrand((2,)), ChernIntegrand((1, 1)), ChernIntegrand((1,), 1),
                  ChernIntegrand((), 2)]}


@pytest.mark.parametrize("name", ["line", "conic", "cubic", "quadric", "nodal_cubic", "cone"])
def test_batch_frame_path_matches_jet_path(name):
    F, _ = variety(name)
    n = F.num_vars - 2
    pts = random_points(F, 40, seed=3)
    surf = Hypersurface(F)
    for h in INTEGRANDS[n]:
        batch = h(surf, pts)
        jet = np.array([jet_density_ratio(F, p, h) for p in pts])
        assert np.allclose(batch, jet, rtol=1e-9, atol=1e-9 * np.max(np.abs(jet)))


def test_frame_curvature_is_flat_minus_second_form():
    F, _ = variety("quadric")
    fc = frame_curvature(Hypersurface(F), random_points(F, 10))
    Rl = lowered_curvature(fc.R, np.eye(2))
    assert np.allclose(Rl, Rl.transpose(0, 3, 2, 1, 4))
    assert np.allclose(Rl, Rl.transpose(0, 1, 4, 3, 2))
    assert np.allclose(fc.second_fundamental, fc.second_fundamental.transpose(0, 2, 1))


def test_unitary_invariance_of_densities():
    F, _ = variety("cubic")
    U = AffineMap.random_unitary(3, np.random.default_rng(5))
    FU = linear_substitute(F, U)
    pts = random_points(F, 50, seed=6)
    q = (np.linalg.inv(U.to_array()) @ pts.T).T
    h = gauss_bonnet_integrand(1)
    a = h(Hypersurface(F), pts)
    b = h(Hypersurface(FU), q)
    assert np.allclose(a, b, rtol=1e-8, atol=1e-8)
    for i in range(5):
        assert jet_density_ratio(FU, q[i], h) == pytest.approx(a[i], rel=1e-8, abs=1e-8)


def test_integrand_degree_checks():
    q = Hypersurface(variety("quadric")[0])
    with pytest.raises(ValueError):
        ChernIntegrand((1,))(q, np.zeros((1, 4)))
    assert mather_degree_integrand(2, 2).name == "w^w"
    assert gauss_bonnet_integrand(2).name == "c2"
    assert MAX_DIM == 3
