"""Truncated Taylor jets in paired variables ``(u_1..u_m, ubar_1..ubar_m)``.

The conjugate variables are independent formal variables.  A jet keeps every
coefficient of total degree ``<= order`` in the ``2m`` variables; products are
truncated on the fly.  Coefficients are complex doubles.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .polynomial import Polynomial, monomials_upto

DEFAULT_ORDER = 4
PIVOT_THRESHOLD = 1e-8


class PivotError(ArithmeticError):
    """The chosen solved variable has a vanishing partial derivative."""


class NewtonError(ArithmeticError):
    """Newton iteration on jets left a residual above tolerance."""


class _Layout:
    """Monomial indexing and product tables for (nvars, order)."""

    def __init__(self, nvars: int, order: int):
        self.nvars, self.order = nvars, order
        self.exponents = monomials_upto(nvars, order)
        self.index = {e: i for i, e in enumerate(self.exponents)}
        self.size = len(self.exponents)
        I, J, K = [], [], []
        for i, a in enumerate(self.exponents):
            da = sum(a)
            for j, b in enumerate(self.exponents):
                if da + sum(b) <= order:
                    I.append(i)
                    J.append(j)
                    K.append(self.index[tuple(x + y for x, y in zip(a, b))])
        self.I, self.J, self.K = (np.array(v, dtype=np.int64) for v in (I, J, K))
        m = nvars // 2
        self.conj_perm = np.array([self.index[e[m:] + e[:m]] for e in self.exponents],
                                  dtype=np.int64)
        self.degrees = np.array([sum(e) for e in self.exponents])


@lru_cache(maxsize=None)
def _layout(nvars: int, order: int) -> _Layout:
    return _Layout(nvars, order)


class Jet:
    """Truncated power series in ``m`` holomorphic and ``m`` antiholomorphic variables.

    Variable ``k < m`` is ``u_k``; variable ``m + k`` is ``ubar_k``.
    """

    __slots__ = ("num_vars", "order", "coeffs")

    def __init__(self, num_vars: int, order: int = DEFAULT_ORDER, coeffs=None):
        if order < 0:
            raise ValueError("jet order must be non-negative")
        self.num_vars = num_vars
        self.order = order
        lay = _layout(2 * num_vars, order)
        if coeffs is None:
            coeffs = np.zeros(lay.size, dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (lay.size,):
            raise ValueError(f"expected {lay.size} coefficients, got {coeffs.shape}")
        self.coeffs = coeffs

    @property
    def layout(self) -> _Layout:
        return _layout(2 * self.num_vars, self.order)

    # constructors --------------------------------------------------------------
    @classmethod
    def constant(cls, c, num_vars: int, order: int = DEFAULT_ORDER) -> "Jet":
        j = cls(num_vars, order)
        j.coeffs[0] = complex(c)
        return j

    @classmethod
    def variable(cls, k: int, num_vars: int, order: int = DEFAULT_ORDER, conjugate: bool = False,
                 value=0.0) -> "Jet":
        """The jet of ``value + u_k`` (or of ``conj(value) + ubar_k`` when ``conjugate``)."""
        j = cls.constant(np.conj(value) if conjugate else value, num_vars, order)
        if order >= 1:
            e = [0] * (2 * num_vars)
            e[k + (num_vars if conjugate else 0)] = 1
            j.coeffs[j.layout.index[tuple(e)]] = 1.0
        return j

    @classmethod
    def from_terms(cls, terms: dict, num_vars: int, order: int = DEFAULT_ORDER) -> "Jet":
        """Build from ``{(hol exponent, antihol exponent): coeff}``; terms above order are dropped."""
        j = cls(num_vars, order)
        for (a, b), c in terms.items():
            e = tuple(a) + tuple(b)
            if sum(e) <= order:
                j.coeffs[j.layout.index[e]] += c
        return j

    # access ---------------------------------------------------------------------
    def coeff(self, hol: Sequence[int], antihol: Sequence[int] | None = None) -> complex:
        e = tuple(hol) + tuple(antihol if antihol is not None else (0,) * self.num_vars)
        if sum(e) > self.order:
            raise ValueError("coefficient beyond truncation order")
        return complex(self.coeffs[self.layout.index[e]])

    def derivative(self, hol: Sequence[int], antihol: Sequence[int] | None = None) -> complex:
        """Mixed partial ``d^hol dbar^antihol`` at the expansion point."""
        antihol = antihol if antihol is not None else (0,) * self.num_vars
        fac = math.prod(math.factorial(k) for k in tuple(hol) + tuple(antihol))
        return fac * self.coeff(hol, antihol)

    @property
    def constant_term(self) -> complex:
        return complex(self.coeffs[0])

    def _like(self, coeffs) -> "Jet":
        return Jet(self.num_vars, self.order, coeffs)

    def _match(self, other: "Jet"):
        if other.num_vars != self.num_vars or other.order != self.order:
            raise ValueError("jets must share num_vars and order")

    # arithmetic -------------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet):
            self._match(other)
            return self._like(self.coeffs + other.coeffs)
        c = self.coeffs.copy()
        c[0] += complex(other)
        return self._like(c)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self._like(self.coeffs * complex(other))
        self._match(other)
        lay = self.layout
        prod_ = self.coeffs[lay.I] * other.coeffs[lay.J]
        out = (np.bincount(lay.K, prod_.real, minlength=lay.size)
               + 1j * np.bincount(lay.K, prod_.imag, minlength=lay.size))
        return self._like(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self._like(self.coeffs / complex(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("jet powers must be non-negative integers")
        result = Jet.constant(1.0, self.num_vars, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def _unit_part(self, what: str):
        a0 = self.constant_term
        if a0 == 0:
            raise ZeroDivisionError(f"{what} of a jet with zero constant term")
        x = self / a0
        x.coeffs[0] = 0.0
        return a0, x

    def reciprocal(self) -> "Jet":
        a0, x = self._unit_part("reciprocal")
        r = Jet.constant(1.0, self.num_vars, self.order)
        for _ in range(self.order):
            r = 1.0 - x * r
        return r / a0

    def log(self) -> "Jet":
        a0, x = self._unit_part("log")
        if a0.imag == 0 and a0.real < 0:
            raise ValueError("log: constant term lies on the branch cut")
        s = Jet(self.num_vars, self.order)
        for k in range(self.order, 0, -1):
            s = x * (((-1) ** (k + 1)) / k + s)
        return s + cmath.log(a0)

    def conjugate(self) -> "Jet":
        """Swap holomorphic and antiholomorphic exponents and conjugate coefficients."""
        return self._like(np.conj(self.coeffs[self.layout.conj_perm]))

    def differentiate(self, var: int) -> "Jet":
        """Partial derivative in formal variable ``var``; the result has order ``order - 1``."""
        if not 0 <= var < 2 * self.num_vars:
            raise ValueError("variable index out of range")
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        lay = self.layout
        out = Jet(self.num_vars, self.order - 1)
        tgt = out.layout
        for i, e in enumerate(lay.exponents):
            if e[var] and sum(e) <= self.order:
                f = list(e)
                f[var] -= 1
                out.coeffs[tgt.index[tuple(f)]] += e[var] * self.coeffs[i]
        return out

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot raise truncation order")
        out = Jet(self.num_vars, order)
        lay = self.layout
        for i, e in enumerate(out.layout.exponents):
            out.coeffs[i] = self.coeffs[lay.index[e]]
        return out

    # diagnostics ------------------------------------------------------------------------
    def reality_defect(self) -> float:
        """Relative size of ``coeff(a,b) - conj(coeff(b,a))``; zero for real-valued jets."""
        diff = self.coeffs - np.conj(self.coeffs[self.layout.conj_perm])
        scale = max(float(np.max(np.abs(self.coeffs))), 1e-300)
        return float(np.max(np.abs(diff))) / scale

    def is_real_valued(self, tol: float = 1e-12) -> bool:
        return self.reality_defect() <= tol

    def is_holomorphic(self) -> bool:
        m = self.num_vars
        return all(self.coeffs[i] == 0 for i, e in enumerate(self.layout.exponents) if any(e[m:]))

    def allclose(self, other: "Jet", rtol: float = 1e-10) -> bool:
        self._match(other)
        scale = max(np.max(np.abs(self.coeffs)), np.max(np.abs(other.coeffs)), 1e-300)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= rtol * scale)

    def __repr__(self):
        nz = {e: complex(c) for e, c in zip(self.layout.exponents, self.coeffs) if abs(c) > 0}
        return f"Jet(m={self.num_vars}, order={self.order}, {nz})"


def polynomial_on_jets(P: Polynomial, jets: Sequence[Jet]) -> Jet:
    """Evaluate ``P`` with variable ``a`` replaced by ``jets[a]``."""
    if len(jets) != P.num_vars:
        raise ValueError("need one jet per polynomial variable")
    m, order = jets[0].num_vars, jets[0].order
    cache: dict[tuple[int, int], Jet] = {}

    def power(a: int, k: int) -> Jet:
        if (a, k) not in cache:
            cache[(a, k)] = jets[a] if k == 1 else power(a, k - 1) * jets[a]
        return cache[(a, k)]

    total = Jet(m, order)
    for e, c in P.terms.items():
        term = Jet.constant(complex(c), m, order)
        for a, k in enumerate(e):
            if k:
                term = term * power(a, k)
        total = total + term
    return total


def taylor_jet(P: Polynomial, center: Sequence[complex], order: int = DEFAULT_ORDER) -> Jet:
    """Holomorphic jet of ``P(center + u)`` by exact binomial expansion (double precision)."""
    if len(center) != P.num_vars:
        raise ValueError("center arity does not match the polynomial")
    m = P.num_vars
    center = [complex(c) for c in center]
    out = Jet(m, order)
    lay = out.layout
    zero = (0,) * m
    for e, c in P.terms.items():
        c = complex(c)
        for ks in product(*(range(k + 1) for k in e)):
            if sum(ks) > order:
                continue
            w = c
            for x, k, j in zip(center, e, ks):
                w *= math.comb(k, j) * x ** (k - j)
            out.coeffs[lay.index[tuple(ks) + zero]] += w
    return out


def _coefficient_scale(f: Polynomial, point: Sequence[complex]) -> float:
    return max(sum(abs(complex(c)) * math.prod(max(1.0, abs(x)) ** k for x, k in zip(point, e))
                   for e, c in f.terms.items()), 1e-300)


def implicit_graph_jet(f: Polynomial, point: Sequence[complex], solved: int,
                       order: int = DEFAULT_ORDER) -> Jet:
    """Jet of ``phi`` with ``f(.., u, .., phi(u), ..) = 0`` near ``point``.

    The free variables are the coordinates other than ``solved`` in ascending order,
    expanded around ``point``.  ``point`` is first refined by up to two Newton steps
    along the solved coordinate.
    """
    N = f.num_vars
    if len(point) != N:
        raise ValueError("point arity does not match the polynomial")
    fc = f.to_complex() if f.exact else f
    w = [complex(x) for x in point]
    grad = [fc.diff(a) for a in range(N)]
    fs = grad[solved]

    def pivot_ok(pt):
        g = np.array([gp.evaluate(pt) for gp in grad])
        gn = float(np.linalg.norm(g))
        return gn > 0 and abs(g[solved]) > PIVOT_THRESHOLD * gn

    if not pivot_ok(w):
        raise PivotError(f"|df/dw{solved}| below {PIVOT_THRESHOLD:g} of the gradient norm")
    scale = _coefficient_scale(fc, w)
    for _ in range(2):
        r = fc.evaluate(w)
        if abs(r) < 1e-15 * scale:
            break
        w[solved] -= r / fs.evaluate(w)
    if abs(fc.evaluate(w)) >= 1e-10 * scale:
        raise NewtonError("point is not on the hypersurface to 1e-10")

    m = N - 1
    free = [a for a in range(N) if a != solved]
    phi = Jet.constant(w[solved], m, order)

    def coords(phi_jet):
        js = [None] * N
        for i, a in enumerate(free):
            js[a] = Jet.variable(i, m, order, value=w[a])
        js[solved] = phi_jet
        return js

    iters = math.ceil(math.log2(order + 1)) + 1
    for _ in range(iters):
        js = coords(phi)
        phi = phi - polynomial_on_jets(fc, js) / polynomial_on_jets(fs, js)
    # floor: when the cancelling terms are themselves at roundoff level (a solved
    # coordinate that is ~0), relative size is meaningless
    rel = graph_residual(fc, coords(phi), floor=1e-6 * scale)
    if rel >= 1e-9:
        raise NewtonError(f"relative jet residual {rel:.3g} not converged")
    return phi


def graph_residual(f: Polynomial, jets: Sequence[Jet], floor: float = 1e-300) -> float:
    """``max |f(jets)|`` relative to the majorant ``|f|(|jets|)`` (coefficientwise moduli),
    i.e. measured against the size of the terms that cancel.  The majorant is floored at
    ``floor``."""
    res = polynomial_on_jets(f, jets)
    fa = Polynomial(f.num_vars, {e: abs(complex(c)) for e, c in f.terms.items()})
    maj = polynomial_on_jets(fa, [j._like(np.abs(j.coeffs)) for j in jets])
    return float(np.max(np.abs(res.coeffs)) / max(float(np.max(np.abs(maj.coeffs))), floor))
