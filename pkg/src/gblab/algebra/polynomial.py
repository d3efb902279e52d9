"""Sparse multivariate polynomials over Q(i) (exact) or C (inexact, double precision).

A polynomial in ``num_vars`` variables ``x0 .. x{num_vars-1}`` is stored as a mapping
from exponent tuples to coefficients.  Exact polynomials carry :class:`QQi`
coefficients; anything that went through floating point carries ``complex``
coefficients and reports ``exact == False``.
"""

from __future__ import annotations

import random
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .numbers import QQi, format_coefficient

Exponent = tuple[int, ...]

MAX_CONDITION = 1e8


def _is_exact_scalar(c) -> bool:
    return isinstance(c, (QQi, int, Rational)) and not isinstance(c, bool)


def _coefficient(c, exact: bool):
    if exact:
        return QQi.coerce(c)
    return complex(c)


class Polynomial:
    """Immutable sparse polynomial.

    Parameters
    ----------
    num_vars
        Number of variables.
    terms
        Mapping ``exponent tuple -> coefficient``.  Zero coefficients are dropped.
    homogeneous
        If true, homogeneity is verified and a ``ValueError`` raised otherwise.
    """

    __slots__ = ("num_vars", "_terms", "exact", "_hash")

    def __init__(self, num_vars: int, terms: Mapping[Exponent, object] | None = None,
                 homogeneous: bool = False):
        if num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        terms = dict(terms or {})
        exact = all(_is_exact_scalar(c) for c in terms.values())
        clean: dict[Exponent, object] = {}
        for e, c in terms.items():
            e = tuple(int(k) for k in e)
            if len(e) != num_vars:
                raise ValueError(f"exponent {e} has arity {len(e)}, expected {num_vars}")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent in {e}")
            c = _coefficient(c, exact)
            if c != 0:
                clean[e] = c
        self.num_vars = num_vars
        self._terms = clean
        self.exact = exact
        self._hash = None
        if homogeneous and not self.is_homogeneous:
            raise ValueError("polynomial flagged homogeneous has terms of different degrees")

    # constructors -----------------------------------------------------------------
    @classmethod
    def constant(cls, c, num_vars: int) -> "Polynomial":
        return cls(num_vars, {(0,) * num_vars: c})

    @classmethod
    def variable(cls, index: int, num_vars: int) -> "Polynomial":
        if not 0 <= index < num_vars:
            raise ValueError(f"variable index {index} out of range for {num_vars} variables")
        e = [0] * num_vars
        e[index] = 1
        return cls(num_vars, {tuple(e): 1})

    # basic properties ---------------------------------------------------------------
    @property
    def terms(self) -> Mapping[Exponent, object]:
        return MappingProxyType(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    @property
    def order(self) -> int:
        """Lowest total degree among the terms (``-1`` for zero)."""
        return min((sum(e) for e in self._terms), default=-1)

    @property
    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def __len__(self):
        return len(self._terms)

    def coefficient(self, exponent: Sequence[int]):
        zero = QQi(0) if self.exact else 0j
        return self._terms.get(tuple(exponent), zero)

    def to_complex(self) -> "Polynomial":
        return Polynomial(self.num_vars, {e: complex(c) for e, c in self._terms.items()})

    def sorted_terms(self) -> list[tuple[Exponent, object]]:
        """Terms in graded-lex order (highest degree first, then lexicographically descending)."""
        return sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    # arithmetic ----------------------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if other.num_vars != self.num_vars:
            raise ValueError(f"arity mismatch: {self.num_vars} vs {other.num_vars}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(other, self.num_vars)

    def _coerce_pair(self, other: "Polynomial"):
        if self.exact and other.exact:
            return self, other
        return self.to_complex() if self.exact else self, other.to_complex() if other.exact else other

    def __add__(self, other):
        a, b = self._coerce_pair(self._lift(other))
        out = dict(a._terms)
        for e, c in b._terms.items():
            out[e] = out[e] + c if e in out else c
        return Polynomial(self.num_vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.num_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        a, b = self._coerce_pair(self._lift(other))
        out: dict[Exponent, object] = {}
        for e1, c1 in a._terms.items():
            for e2, c2 in b._terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return Polynomial(self.num_vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if other.degree > 0 or other.is_zero:
                raise ZeroDivisionError("division only by nonzero constants")
            other = other.coefficient((0,) * other.num_vars)
        if other == 0:
            raise ZeroDivisionError("division by zero constant")
        inv = (QQi.coerce(other).inverse() if self.exact and _is_exact_scalar(other)
               else 1 / complex(other))
        return self * inv

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(1, self.num_vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            if self.degree <= 0:
                return self.coefficient((0,) * self.num_vars) == other
            return NotImplemented
        return self.num_vars == other.num_vars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, frozenset(self._terms.items())))
        return self._hash

    # calculus / evaluation -------------------------------------------------------------
    def diff(self, var: int) -> "Polynomial":
        out = {}
        for e, c in self._terms.items():
            if e[var]:
                f = list(e)
                f[var] -= 1
                out[tuple(f)] = c * e[var]
        return Polynomial(self.num_vars, out) if out else self._zero()

    def gradient(self) -> list["Polynomial"]:
        return [self.diff(i) for i in range(self.num_vars)]

    def _zero(self):
        p = Polynomial(self.num_vars)
        p.exact = self.exact
        return p

    def __call__(self, point: Sequence):
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        """Evaluate at a point; exact when both polynomial and point are exact."""
        if len(point) != self.num_vars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.num_vars}")
        exact = self.exact and all(_is_exact_scalar(x) for x in point)
        if exact:
            pt = [QQi.coerce(x) for x in point]
            total = QQi(0)
        else:
            pt = [complex(x) for x in point]
            total = 0j
        for e, c in self._terms.items():
            term = c if exact else complex(c)
            for x, k in zip(pt, e):
                if k:
                    term = term * x ** k
            total = total + term
        return total

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Compose: replace ``x_a`` by ``images[a]`` (all images share an arity)."""
        if len(images) != self.num_vars:
            raise ValueError("need one image per variable")
        nv = images[0].num_vars if images else 0
        powers: dict[tuple[int, int], Polynomial] = {}

        def power(a: int, k: int) -> Polynomial:
            if (a, k) not in powers:
                powers[(a, k)] = images[a] ** k
            return powers[(a, k)]

        exact = self.exact and all(p.exact for p in images)
        total = Polynomial(nv, {})
        total.exact = exact
        for e, c in self._terms.items():
            term = Polynomial.constant(c if exact else complex(c), nv)
            for a, k in enumerate(e):
                if k:
                    term = term * power(a, k)
            total = total + term
        return total

    # text ---------------------------------------------------------------------------------
    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        flag = "" if self.exact else ", inexact"
        return f"Polynomial({self.num_vars} vars{flag}: {format_polynomial(self)})"


def _monomial_text(e: Exponent) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"x{i}")
        elif k > 1:
            parts.append(f"x{i}^{k}")
    return "*".join(parts)


def _signed_coefficient(c) -> tuple[str, str]:
    """Split a coefficient into (sign, magnitude text)."""
    if isinstance(c, QQi):
        if c.im == 0:
            return ("-" if c.re < 0 else "+"), format_coefficient(QQi(abs(c.re)))
        if c.re == 0:
            return ("-" if c.im < 0 else "+"), format_coefficient(QQi(0, abs(c.im)))
        return "+", format_coefficient(c)
    c = complex(c)
    if c.imag == 0:
        return ("-" if c.real < 0 else "+"), repr(abs(c.real))
    if c.real == 0:
        return ("-" if c.imag < 0 else "+"), f"{abs(c.imag)!r}*i"
    sign = "-" if c.imag < 0 else "+"
    return "+", f"({c.real!r} {sign} {abs(c.imag)!r}*i)"


def format_polynomial(p: Polynomial) -> str:
    """Canonical printer: graded-lex term order, exact rationals as ``p/q``."""
    if p.is_zero:
        return "0"
    out = []
    for idx, (e, c) in enumerate(p.sorted_terms()):
        sign, mag = _signed_coefficient(c)
        mono = _monomial_text(e)
        if mono:
            body = mono if mag in ("1", "1.0") else f"{mag}*{mono}"
        else:
            body = mag
        if idx == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# ---------------------------------------------------------------------------------------
# affine charts, translations and linear changes of coordinates


def dehomogenize(F: Polynomial, chart: int) -> Polynomial:
    """Set ``x_chart = 1``; the remaining variables keep ascending original order."""
    if not F.is_homogeneous:
        raise ValueError("dehomogenize requires a homogeneous polynomial")
    if not 0 <= chart < F.num_vars:
        raise ValueError(f"chart index {chart} out of range")
    out: dict[Exponent, object] = {}
    for e, c in F.terms.items():
        f = e[:chart] + e[chart + 1:]
        out[f] = out[f] + c if f in out else c
    return Polynomial(F.num_vars - 1, out)


def homogenize(f: Polynomial, chart: int, degree: int | None = None) -> Polynomial:
    """Inverse of :func:`dehomogenize`: insert ``x_chart`` as the homogenizing variable."""
    d = f.degree if degree is None else degree
    out = {}
    for e, c in f.terms.items():
        out[e[:chart] + (d - sum(e),) + e[chart:]] = c
    return Polynomial(f.num_vars + 1, out)


def translate(f: Polynomial, point: Sequence) -> Polynomial:
    """Return ``f(point + y)`` as a polynomial in ``y`` (exact for exact inputs)."""
    images = [Polynomial.variable(i, f.num_vars) + point[i] for i in range(f.num_vars)]
    return f.substitute(images)


class AffineMap:
    """Invertible linear substitution ``x = A y`` on homogeneous coordinates.

    Entries are exact (:class:`QQi`) or complex.  Maps with condition number above
    ``1e8`` are rejected.
    """

    def __init__(self, matrix: Sequence[Sequence]):
        rows = [list(r) for r in matrix]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("AffineMap needs a square matrix")
        self.exact = all(_is_exact_scalar(x) for r in rows for x in r)
        self.matrix = tuple(tuple(QQi.coerce(x) if self.exact else complex(x) for x in r)
                            for r in rows)
        self.size = n
        arr = self.to_array()
        s = np.linalg.svd(arr, compute_uv=False)
        if s[-1] == 0 or (self.exact and _exact_rank(self.matrix) < n):
            raise ValueError("singular AffineMap")
        self.condition_number = float(s[0] / s[-1])
        if self.condition_number > MAX_CONDITION:
            raise ValueError(f"AffineMap condition number {self.condition_number:.3g} exceeds 1e8")

    def to_array(self) -> np.ndarray:
        return np.array([[complex(x) for x in r] for r in self.matrix], dtype=complex)

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def swap(cls, n: int, i: int, j: int) -> "AffineMap":
        m = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
        m[i][i] = m[j][j] = 0
        m[i][j] = m[j][i] = 1
        return cls(m)

    @classmethod
    def random_exact(cls, n: int, rng: random.Random, bound: int = 5) -> "AffineMap":
        """Random invertible map with small integer-over-small-integer entries."""
        while True:
            m = [[Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(n)]
                 for _ in range(n)]
            try:
                return cls(m)
            except ValueError:
                continue

    @classmethod
    def random_unitary(cls, n: int, rng: np.random.Generator) -> "AffineMap":
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        q, r = np.linalg.qr(z)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        return cls(q.tolist())

    def inverse(self) -> "AffineMap":
        if self.exact:
            return AffineMap(_exact_inverse(self.matrix))
        return AffineMap(np.linalg.inv(self.to_array()).tolist())

    def apply(self, y: Sequence):
        """Image ``A y`` of a coordinate vector."""
        if self.exact and all(_is_exact_scalar(v) for v in y):
            yy = [QQi.coerce(v) for v in y]
            return [sum((a * v for a, v in zip(r, yy)), QQi(0)) for r in self.matrix]
        return list(self.to_array() @ np.asarray(y, dtype=complex))


def linear_substitute(F: Polynomial, A: AffineMap) -> Polynomial:
    """Composition ``F(A y)``; exact when ``F`` and ``A`` are exact, inexact otherwise."""
    if A.size != F.num_vars:
        raise ValueError(f"arity mismatch: map of size {A.size} on {F.num_vars} variables")
    n = F.num_vars
    images = []
    for row in A.matrix:
        images.append(Polynomial(n, {tuple(1 if k == j else 0 for k in range(n)): a
                                     for j, a in enumerate(row)}))
    return F.substitute(images)


def _exact_rank(rows: Sequence[Sequence[QQi]]) -> int:
    m = [list(r) for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = m[rank][col].inverse()
        for i in range(rank + 1, len(m)):
            if m[i][col]:
                f = m[i][col] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def _exact_inverse(rows: Sequence[Sequence[QQi]]) -> list[list[QQi]]:
    n = len(rows)
    m = [list(r) + [QQi(1) if i == j else QQi(0) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next(i for i in range(col, n) if m[i][col])
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col].inverse()
        m[col] = [a * inv for a in m[col]]
        for i in range(n):
            if i != col and m[i][col]:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return [r[n:] for r in m]


def monomials_of_degree(num_vars: int, degree: int) -> list[Exponent]:
    """Exponents of total degree exactly ``degree``, lexicographically descending."""
    if num_vars == 0:
        return [()] if degree == 0 else []
    if num_vars == 1:
        return [(degree,)]
    return [(k,) + rest for k in range(degree, -1, -1)
            for rest in monomials_of_degree(num_vars - 1, degree - k)]


def monomials_upto(num_vars: int, degree: int) -> list[Exponent]:
    """All exponents of total degree ``<= degree``, ascending by degree."""
    return [e for d in range(degree + 1) for e in monomials_of_degree(num_vars, d)]


def exact_point(values: Iterable) -> list[QQi]:
    return [QQi.coerce(v) for v in values]
