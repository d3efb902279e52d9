import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gblab.algebra import (Jet, Polynomial, graph_residual, implicit_graph_jet, parse_polynomial,
                           taylor_jet)


def u(k=0, m=1, order=4, conj=False, value=0.0):
    return Jet.variable(k, m, order, conjugate=conj, value=value)


def one(m=1, order=4):
    return Jet.constant(1.0, m, order)


def test_taylor_examples():
    j = taylor_jet(parse_polynomial("x0^2", 1), [1.0], order=2)
    assert [j.coeff((k,)) for k in range(3)] == [1, 2, 1]
    a, b = 2 - 1j, 0.5 + 3j
    j = taylor_jet(parse_polynomial("x0*x1", 2), [a, b])
    assert j.coeff((0, 0)) == pytest.approx(a * b)
    assert j.coeff((1, 0)) == pytest.approx(b)
    assert j.coeff((0, 1)) == pytest.approx(a)
    assert j.coeff((1, 1)) == pytest.approx(1)
    j0 = taylor_jet(parse_polynomial("x0^3 + 2", 1), [2.0], order=0)
    assert j0.order == 0 and j0.constant_term == pytest.approx(10)


def test_product_and_series():
    x = u()
    assert ((1 + x) * (1 - x)).allclose(one() - x * x)
    log = (one() + x).log()
    for k in range(1, 5):
        assert log.coeff((k,)) == pytest.approx((-1) ** (k + 1) / k)
    rec = (one() + x).reciprocal()
    for k in range(5):
        assert rec.coeff((k,)) == pytest.approx((-1) ** k)


def test_truncation_closure():
    x = u(order=3)
    y = x ** 5
    assert np.all(y.coeffs == 0)
    with pytest.raises(ValueError):
        x.coeff((4,))


def test_reality_pairing_of_kahler_potential():
    m = 2
    S = Jet.constant(1.0, m)
    for k, v in enumerate((0.3 + 0.1j, -0.2j)):
        z = u(k, m, value=v)
        S = S + z * z.conjugate()
    K = S.log()
    assert K.is_real_valued(1e-12)
    assert K.reality_defect() < 1e-12
    assert not u(0, m).is_real_valued()


def _random_jet(rng, m=2, order=4, unit=True):
    shape = Jet(m, order).coeffs.shape
    j = Jet(m, order, 0.5 * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)))
    if unit:
        j.coeffs[0] = 3.0 + rng.uniform(-1, 1)
    return j


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_ring_laws_random(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (_random_jet(rng) for _ in range(3))
    assert ((a * b) * c).allclose(a * (b * c), 1e-10)
    assert (a * a.reciprocal()).allclose(Jet.constant(1.0, 2), 1e-10)
    for var in range(4):
        lhs = a.log().differentiate(var)
        rhs = a.differentiate(var) * a.reciprocal().truncate(3)
        assert lhs.allclose(rhs, 1e-10)


def _central_difference(P, center, hol):
    # mixed partial by nested central differences on the exact polynomial
    h = 1e-4
    Pc = P.to_complex()
    m = len(center)

    def rec(point, k):
        if k == m:
            return complex(Pc.evaluate(point))
        if hol[k] == 0:
            return rec(point, k + 1)
        # central difference of order hol[k] on an order-2 stencil
        n = hol[k]
        total = 0
        for j in range(n + 1):
            p = list(point)
            p[k] = p[k] + (n / 2 - j) * h
            total += (-1) ** j * math.comb(n, j) * rec(p, k + 1)
        return total / h ** n
    return rec(list(center), 0)


def _cauchy_coefficients(P, center, order, radius=0.5, samples=16):
    """Taylor coefficients from the DFT of P on a torus around center (exact for polynomials
    when samples exceed the degree)."""
    m = len(center)
    Pc = P.to_complex()
    grid = np.exp(2j * np.pi * np.arange(samples) / samples)
    vals = np.empty((samples,) * m, dtype=complex)
    for idx in np.ndindex(*vals.shape):
        vals[idx] = complex(Pc.evaluate([c + radius * grid[i] for c, i in zip(center, idx)]))
    F = np.fft.fftn(vals) / samples ** m
    return lambda e: F[tuple(e)] / radius ** sum(e)


@st.composite
def small_polys(draw, m=2):
    terms = {}
    for _ in range(draw(st.integers(1, 5))):
        e = tuple(draw(st.lists(st.integers(0, 4), min_size=m, max_size=m)))
        terms[e] = draw(st.integers(-4, 4))
    return Polynomial(m, terms)


@settings(max_examples=200, deadline=None)
@given(small_polys(), st.lists(st.floats(-1, 1), min_size=2, max_size=2),
       st.integers(0, 4))
def test_taylor_matches_cauchy_dft(P, center, order):
    j = taylor_jet(P, center, order)
    ref = _cauchy_coefficients(P, center, order)
    scale = max(1.0, max(abs(complex(c)) for c in P.to_complex().terms.values()) if P.terms else 1)
    for e in j.layout.exponents:
        if any(e[2:]):
            continue
        assert abs(j.coeff(e[:2]) - ref(e[:2])) <= 1e-9 * scale * 10 ** sum(e)


@pytest.mark.parametrize("hol", [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])
def test_taylor_matches_finite_differences(hol):
    P = parse_polynomial("x0^3*x1 - 2*x0*x1^2 + x1^4", 2)
    center = [0.3, -0.7]
    j = taylor_jet(P, center)
    assert j.derivative(hol) == pytest.approx(_central_difference(P, center, hol), rel=1e-6)


def test_implicit_graph_examples():
    d, a = 0.01, 0.5
    f = parse_polynomial("x0*x1 - 1/100", 2)
    phi = implicit_graph_jet(f, [a, d / a], solved=1)
    assert phi.constant_term == pytest.approx(d / a, rel=1e-12)
    assert phi.coeff((1,)) == pytest.approx(-d / a ** 2, rel=1e-10)
    assert phi.coeff((2,)) == pytest.approx(d / a ** 3, rel=1e-10)
    c = 0.7
    phi = implicit_graph_jet(parse_polynomial("x1 - x0^2", 2), [c, c * c], solved=1)
    assert [phi.coeff((k,)) for k in range(3)] == pytest.approx([c * c, 2 * c, 1])
    assert abs(phi.coeff((3,))) < 1e-12


def _coords(f, point, solved, phi):
    N = f.num_vars
    free = [k for k in range(N) if k != solved]
    return [phi if k == solved else Jet.variable(free.index(k), N - 1, phi.order, value=point[k])
            for k in range(N)]


@pytest.mark.parametrize("seed", range(5))
def test_implicit_graph_residual_and_chart_consistency(seed):
    rng = np.random.default_rng(seed)
    f = parse_polynomial("x0^3 + x1^3 + x2^3 + 1", 3)
    x0, x1 = rng.standard_normal(2) * 0.4
    r = np.roots([1, 0, 0, x0 ** 3 + x1 ** 3 + 1])[0]
    pt = [x0, x1, r]
    for solved in range(3):
        phi = implicit_graph_jet(f, pt, solved)
        assert graph_residual(f.to_complex(), _coords(f, pt, solved, phi)) < 1e-9


def test_pivot_threshold():
    from gblab.algebra import PivotError
    f = parse_polynomial("x1 - x0^2", 2)
    with pytest.raises(PivotError):
        implicit_graph_jet(f, [0.0, 0.0], solved=0)
