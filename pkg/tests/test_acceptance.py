"""Acceptance criteria, each at its stated tolerance.  A summary line per criterion is
printed at the end of the run (see conftest)."""

import random
import time
from fractions import Fraction
from math import comb
from pathlib import Path

import numpy as np
import pytest

from gblab import invariants as inv
from gblab.algebra import AffineMap, linear_substitute, parse_polynomial
from gblab.cm_poly import DegreePolynomial, cm_from_betas, involution_I, pf_from_betas
from gblab.curvature import (UnitIntegrand, all_chern_forms, chern_curvature, density,
                             pfaffian_crosscheck, pullback_metric)
from gblab.lab import load_scenario, report_json, run_scenario
from gblab.sampler import crofton_integrate

from conftest import VARIETIES, random_points, variety

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
criterion = pytest.mark.criterion


def run(name, **kw):
    t0 = time.perf_counter()
    rep = run_scenario(load_scenario(SCENARIOS / f"{name}.json", **kw))
    assert rep.error is None, rep.error
    return rep, time.perf_counter() - t0


def closed_form(eps):
    return 2 * (eps * eps - 1) / (eps * eps + 1)


# 1 ---------------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def conic_family():
    return run("conic_family_tube_scan")


C1 = (1, "conic degeneration: tube values, delta plateau, eps->0 fit, <= 5 min")


@criterion(*C1)
def test_c1_reference_values():
    assert [round(closed_form(e), 4) for e in (0.3, 0.5, 1.0)] == [-1.6697, -1.2, 0.0]


@criterion(*C1)
@pytest.mark.parametrize("eps", [0.3, 0.5, 1.0])
def test_c1_tube_values(conic_family, eps):
    rep, _ = conic_family
    q = rep.quantity(f"tube(eps={eps:g})")
    assert abs(q.mean - closed_form(eps)) <= max(3 * q.stderr, 0.05)
    assert rep.diagnostics["plateaus"][f"{eps:g}"]["found"]


@criterion(*C1)
def test_c1_fit_and_runtime(conic_family):
    rep, seconds = conic_family
    fit = rep.quantity("tube(eps->0)")
    assert abs(fit.mean + 2.0) <= 0.1
    assert rep.diagnostics["fit"]["powers"] == [0, 2]
    assert seconds <= 300
    rows = rep.tables[0].rows
    assert rep.tables[0].name == "scan" and len(rows) == 7 * 5   # deltas x (tube + fit) epsilons


# 2 ---------------------------------------------------------------------------------------

C2 = (2, "smooth Gauss-Bonnet: line 2, conic 2, cubic 0, quadric 4; <= 10 min")
_c2_time = []


@criterion(*C2)
@pytest.mark.parametrize("name,exact", [("line", 2), ("conic", 2), ("cubic", 0), ("quadric", 4)])
def test_c2_smooth_gauss_bonnet(name, exact):
    rep, seconds = run(f"{name}_gauss_bonnet")
    _c2_time.append(seconds)
    q = rep.quantity("gauss_bonnet")
    assert q.exact == exact
    if name == "cubic":
        assert abs(q.mean - exact) <= 0.05
    else:
        assert abs(q.z) <= 3
    assert rep.passed
    assert rep.diagnostics["resample_rate"] < 1e-3


@criterion(*C2)
def test_c2_runtime():
    assert len(_c2_time) == 4 and sum(_c2_time) <= 600


# 3 ---------------------------------------------------------------------------------------

C3 = (3, "singular Gauss-Bonnet via excision within 5%; <= 15 min")
_c3_time = []


@criterion(*C3)
@pytest.mark.parametrize("name,exact", [("nodal_cubic", 2), ("cuspidal_cubic", 3),
                                        ("crossing_lines", 4), ("cone", 2)])
def test_c3_singular_gauss_bonnet(name, exact):
    rep, seconds = run(f"{name}_gauss_bonnet")
    _c3_time.append(seconds)
    q = rep.quantity("gauss_bonnet")
    assert q.exact == exact
    assert abs(q.mean - exact) <= 0.05 * exact


@criterion(*C3)
def test_c3_runtime():
    assert len(_c3_time) == 4 and sum(_c3_time) <= 900


# 4 ---------------------------------------------------------------------------------------

C4 = (4, "quadric c1^2 = 8, c2 = 4, deg c1^M = 4 (3 sigma); cone degrees (2, 4, 2) within 5%")


@criterion(*C4)
def test_c4_quadric_chern_numbers():
    rep, _ = run("quadric_chern_numbers")
    for name, exact in (("c1^c1", 8), ("c2", 4)):
        q = rep.quantity(name)
        assert q.exact == exact and abs(q.z) <= 3


@criterion(*C4)
def test_c4_quadric_mather_degree():
    rep, _ = run("quadric_degree_profile")
    q = rep.quantity("deg c1^M")
    assert q.exact == 4 and abs(q.z) <= 3


@criterion(*C4)
def test_c4_cone_mather_degrees():
    rep, _ = run("cone_degree_profile")
    for i, exact in enumerate((2, 4, 2)):
        q = rep.quantity(f"deg c{i}^M")
        assert q.exact == exact and abs(q.mean - exact) <= 0.05 * exact


# 5 ---------------------------------------------------------------------------------------

C5 = (5, "involution: I o I = id; CM = I(Pf) exactly and within 3 sigma numerically")


@criterion(*C5)
@pytest.mark.parametrize("degree", range(6))
def test_c5_involution_identity(degree):
    rnd = random.Random(degree)
    for _ in range(1000):
        p = DegreePolynomial([rnd.randint(-1000, 1000) for _ in range(degree + 1)])
        assert involution_I(involution_I(p)) == p


def _independent_cm(name, F, sings):
    """Mather-Chern degrees from classical data: Chern classes for smooth varieties,
    (GB, degree) for curves, and the cone's (2, 4, 2)."""
    N, d = F.num_vars - 1, F.degree
    n = N - 1
    if name == "cone":
        return (2, 4, 2)
    if n == 1:
        return (inv.gauss_bonnet_prediction(F, sings), d)
    s = [sum(comb(N + 1, j) * (-d) ** (k - j) for j in range(k + 1)) for k in range(N)]
    return tuple(d * s[n - i] for i in range(n + 1))


@criterion(*C5)
@pytest.mark.parametrize("name", sorted(VARIETIES))
def test_c5_cm_from_combinatorial_betas(name):
    F, sings = variety(name)
    n = F.num_vars - 2
    betas = [inv.beta_combinatorial(F, sings, r) for r in range(n + 1)]
    cm = involution_I(pf_from_betas(betas))
    assert cm == cm_from_betas(betas)
    assert cm.integers() == list(_independent_cm(name, F, sings))


@criterion(*C5)
def test_c5_cm_from_numeric_betas():
    rep, _ = run("cone_sections_involution")
    for i, exact in enumerate((2, 4, 2)):
        q = rep.quantity(f"cm_{i} (numeric betas)")
        assert q.exact == exact and abs(q.z) <= 3
    assert rep.diagnostics["involution_roundtrip_exact"]


# 6 ---------------------------------------------------------------------------------------

C6 = (6, "node telescoping -2 with mu = 1; crossing-lines tube limit -2 within 0.1")


@criterion(*C6)
def test_c6_telescoping_node():
    g = inv.GermRecord.from_affine(parse_polynomial("x0*x1", 2))
    assert inv.milnor_number(g) == 1
    assert inv.telescoping_prediction(g) == -2 == (-1) ** 1 * 1 - 2 + 1
    F, sings = variety("crossing_lines")
    rec = inv.singularity_records(F, sings)[0]
    assert rec.sigma - rec.eu == inv.telescoping_prediction(rec)


@criterion(*C6)
def test_c6_tube_prediction_matches_numeric_limit(conic_family):
    F, sings = variety("crossing_lines")
    assert inv.tube_prediction(F, sings) == -2
    rep, _ = conic_family
    assert abs(rep.quantity("tube(eps->0)").mean - (-2)) <= 0.1


# 7 ---------------------------------------------------------------------------------------

C7 = (7, "Milnor suite exact vs quasi-homogeneous oracle, invariant under 10 maps; <= 1 min")

GERMS = [("x0^2 + x1^2", 2, ("1/2", "1/2"), 1), ("x0^2 + x1^3", 2, ("1/2", "1/3"), 2),
         ("x0^3 + x1^3", 2, ("1/3", "1/3"), 4), ("x0^3 + x1^4", 2, ("1/3", "1/4"), 6),
         ("x0^2 + x1^2 + x2^2", 3, ("1/2", "1/2", "1/2"), 1)]


@criterion(*C7)
def test_c7_milnor_suite():
    t0 = time.perf_counter()
    rnd = random.Random(7)
    for text, n, w, mu in GERMS:
        f = parse_polynomial(text, n)
        assert inv.milnor_number(f) == inv.milnor_quasi_homogeneous([Fraction(x) for x in w], f) == mu
        for _ in range(10):
            assert inv.milnor_number(linear_substitute(f, AffineMap.random_exact(n, rnd))) == mu
    rep, _ = run("cuspidal_cubic_milnor")
    assert rep.passed
    assert time.perf_counter() - t0 <= 60


# 8 ---------------------------------------------------------------------------------------

C8 = (8, "Pfaffian cross-path at 10^3 points per variety, 1e-9 relative")


@criterion(*C8)
@pytest.mark.parametrize("name", sorted(VARIETIES))
def test_c8_pfaffian_cross_path(name):
    F, _ = variety(name)
    n = F.num_vars - 2
    pts = random_points(F, 1000, seed=8)
    assert len(pts) == 1000
    worst = 0.0
    for p in pts:
        m = pullback_metric(F, p)
        th = chern_curvature(m)
        top = float(density([all_chern_forms(th)[n]]))
        pf = float(pfaffian_crosscheck(th, m))
        scale = max(abs(top), float(np.max(np.abs(th.forms))) ** n / (2 * np.pi) ** n)
        worst = max(worst, abs(pf - top) / scale)
    assert worst <= 1e-9


# 9 ---------------------------------------------------------------------------------------

C9 = (9, "embedding invariance on the nodal cubic, 3 exact maps, 3 combined sigma")


@criterion(*C9)
def test_c9_embedding_invariance():
    rep, _ = run("nodal_cubic_embedding")
    diffs = [q for q in rep.quantities if q.name.startswith("gauss_bonnet(F o A")]
    assert len(diffs) == 3
    for q in diffs:
        assert q.exact == 0 and abs(q.z) <= 3


# 10 --------------------------------------------------------------------------------------

C10 = (10, "Crofton volumes d*pi at 10^6 lines; identical reports at 1, 4, 16 workers")


@criterion(*C10)
@pytest.mark.parametrize("d,text", [(1, "x0 + 2*x1 - x2"), (2, "x0*x1 - x2^2"),
                                    (3, "x0^3 + x1^3 + x2^3")])
def test_c10_volumes(d, text):
    est = crofton_integrate(parse_polynomial(text, 3), UnitIntegrand(), lines=1_000_000, seed=d)
    assert abs(est.mean - d * np.pi) <= 3 * est.stderr + 1e-12 * d * np.pi


@criterion(*C10)
def test_c10_worker_independent_reports():
    cfg = load_scenario(SCENARIOS / "nodal_cubic_gauss_bonnet.json", lines=100_000)
    texts = {w: report_json(run_scenario(cfg, workers=w)) for w in (1, 4, 16)}
    assert texts[1] == texts[4] == texts[16]
