"""Exact invariants of isolated hypersurface singularities and the integer predictions
built from them (Euler characteristics, Gauss-Bonnet sums, tube limits, section integrals).

Milnor numbers are colengths of the Jacobian ideal, computed as the stabilized value of
``dim C[x]_{<=D} / (J + m^{D+1})`` by exact sparse elimination.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, prod
from typing import Sequence

import numpy as np

from .algebra import Polynomial, QQi, dehomogenize, monomials_upto, translate

log = logging.getLogger(__name__)

MAX_TRUNCATION = 20
STABLE_WINDOW = 3
SECTION_DRAWS = 9
SECTION_AGREE = 3


class InvariantError(ValueError):
    """Germ is not an isolated singularity, or a declared singular point is wrong."""


def _exact(c):
    """Fraction for real Gaussian rationals (much faster), QQi otherwise."""
    c = QQi.coerce(c)
    return c.re if c.im == 0 else c


@dataclass(frozen=True)
class GermRecord:
    """Affine germ ``f`` with the singular point moved to the origin.

    ``num_vars`` is the ambient affine dimension ``N``; the hypersurface germ has
    dimension ``n = N - 1``.
    """

    f: Polynomial
    base_point: tuple
    num_vars: int
    chart: int | None = None
    projective_point: tuple | None = None

    def __post_init__(self):
        if not self.f.exact:
            raise InvariantError("germs must have exact coefficients")
        if self.f.num_vars != self.num_vars:
            raise InvariantError("germ arity mismatch")
        zero = [0] * self.num_vars
        if self.f.is_zero:
            raise InvariantError("zero germ")
        if self.f.evaluate(zero) != 0:
            raise InvariantError("germ does not vanish at the base point")
        if any(g.evaluate(zero) != 0 for g in self.f.gradient()):
            raise InvariantError("gradient does not vanish: base point is smooth")

    @property
    def dim(self) -> int:
        return self.num_vars - 1

    @classmethod
    def from_affine(cls, f: Polynomial, point: Sequence | None = None) -> "GermRecord":
        point = tuple(QQi.coerce(x) for x in (point or [0] * f.num_vars))
        g = translate(f, list(point)) if any(point) else f
        return cls(g, point, f.num_vars)

    @classmethod
    def from_projective(cls, F: Polynomial, point: Sequence, chart: int | None = None
                        ) -> "GermRecord":
        p = [QQi.coerce(x) for x in point]
        if len(p) != F.num_vars:
            raise InvariantError("point arity does not match F")
        if chart is None:
            chart = max(range(len(p)), key=lambda k: (abs(complex(p[k])), -k))
        if not p[chart]:
            raise InvariantError("chart coordinate of the point is zero")
        affine = [x / p[chart] for k, x in enumerate(p) if k != chart]
        f = dehomogenize(F, chart)
        g = translate(f, affine)
        return cls(g, tuple(affine), f.num_vars, chart, tuple(p))


@dataclass(frozen=True)
class SingularityRecord:
    point: tuple
    mu: int
    mu_section: int
    m: int
    eu: int
    sigma: int
    dim: int

    def __post_init__(self):
        sign = (-1) ** self.dim
        if self.eu != 1 - sign * self.mu_section or self.sigma != 1 + sign * self.mu:
            raise InvariantError("Euler obstruction / specialization identities violated")
        if self.m < 2:
            raise InvariantError("a singular point has multiplicity at least 2")

    @classmethod
    def from_germ(cls, g: GermRecord, seed: int = 0) -> "SingularityRecord":
        mu = milnor_number(g)
        mu_sec = sectional_milnor(g, 1, seed=seed)
        n = g.dim
        return cls(point=g.projective_point or g.base_point, mu=mu, mu_section=mu_sec,
                   m=multiplicity(g), eu=1 - (-1) ** n * mu_sec, sigma=1 + (-1) ** n * mu,
                   dim=n)

    def as_dict(self) -> dict:
        return {"point": [str(x) for x in self.point], "mu": self.mu,
                "mu_section": self.mu_section, "m": self.m, "eu": self.eu, "sigma": self.sigma}


def _germ(g) -> GermRecord:
    return g if isinstance(g, GermRecord) else GermRecord.from_affine(g)


def multiplicity(g: GermRecord | Polynomial) -> int:
    return _germ(g).f.order


# ---------------------------------------------------------------------------------------
# Milnor numbers


def _check_isolated(f: Polynomial, samples: int = 64, seed: int = 0) -> None:
    """Spot check that the gradient does not vanish on spheres of radius 0.1 and 1."""
    rng = np.random.default_rng(seed)
    grads = [g.to_complex() for g in f.gradient()]
    scale = max(abs(complex(c)) for c in f.terms.values())
    for radius in (0.1, 1.0):
        z = rng.standard_normal((samples, f.num_vars)) + 1j * rng.standard_normal((samples, f.num_vars))
        z *= radius / np.linalg.norm(z, axis=1, keepdims=True)
        norms = np.array([np.linalg.norm([complex(g.evaluate(row)) for g in grads]) for row in z])
        if np.min(norms) < 1e-12 * scale:
            raise InvariantError(f"gradient nearly vanishes on the sphere of radius {radius}")


def _reduce(row: dict, pivots: dict) -> dict:
    """Fully reduce the leading (smallest-index) entries of ``row`` by existing pivots."""
    while row:
        lead = min(row)
        piv = pivots.get(lead)
        if piv is None:
            return row
        c = row[lead]
        for k, v in piv.items():
            nv = row.get(k, 0) - c * v
            if nv:
                row[k] = nv
            else:
                row.pop(k, None)
    return row


def jacobian_colength(f: Polynomial, D: int) -> int:
    """``dim C[x]_{<=D} / (J + m^{D+1})`` for the Jacobian ideal ``J`` of ``f``."""
    N = f.num_vars
    monos = monomials_upto(N, D)
    col = {e: i for i, e in enumerate(monos)}
    partials = [{e: _exact(c) for e, c in g.terms.items()} for g in f.gradient()]
    pivots: dict[int, dict] = {}
    for p in partials:
        if not p:
            continue
        lo = min(sum(e) for e in p)
        for m in monos:
            if sum(m) + lo > D:
                break
            row = {}
            for e, c in p.items():
                t = tuple(a + b for a, b in zip(e, m))
                if sum(t) <= D:
                    row[col[t]] = c
            row = _reduce(row, pivots)
            if row:
                lead = min(row)
                inv = 1 / row[lead]
                pivots[lead] = {k: v * inv for k, v in row.items()}
    return len(monos) - len(pivots)


def milnor_number(g: GermRecord | Polynomial, check: bool = True) -> int:
    """Milnor number by stabilization of truncated Jacobian colengths (``D <= 20``)."""
    germ = _germ(g)
    f = germ.f
    if check:
        _check_isolated(f)
    history = []
    for D in range(2, MAX_TRUNCATION + 1):
        history.append(jacobian_colength(f, D))
        if len(history) >= STABLE_WINDOW and len(set(history[-STABLE_WINDOW:])) == 1:
            return history[-1]
    raise InvariantError(f"Jacobian colength did not stabilize by degree {MAX_TRUNCATION} "
                         f"(last values {history[-3:]}); singularity not isolated?")


def milnor_quasi_homogeneous(weights: Sequence, f: Polynomial | None = None) -> int:
    """``prod(1/w_i - 1)`` for a germ that is weighted-homogeneous of weight-degree 1."""
    w = [Fraction(x) for x in weights]
    if any(x <= 0 or x >= 1 for x in w):
        raise InvariantError("weights must lie strictly between 0 and 1")
    if f is not None:
        if f.num_vars != len(w):
            raise InvariantError("weight count does not match the germ")
        for e in f.terms:
            if sum(a * x for a, x in zip(e, w)) != 1:
                raise InvariantError(f"term {e} does not have weighted degree 1")
    value = prod((1 / x - 1 for x in w), start=Fraction(1))
    if value.denominator != 1:
        raise InvariantError(f"weights give a non-integer Milnor number {value}")
    return int(value)


def _random_section(f: Polynomial, k: int, rnd: random.Random) -> Polynomial:
    """Substitute the last ``k`` variables by small random rational combinations of the rest."""
    N = f.num_vars
    free = N - k
    images = [Polynomial.variable(i, free) for i in range(free)]
    for _ in range(k):
        terms = {}
        for j in range(free):
            c = Fraction(rnd.randint(-6, 6), rnd.randint(1, 7))
            if c:
                terms[tuple(1 if a == j else 0 for a in range(free))] = c
        images.append(Polynomial(free, terms))
    return f.substitute(images)


def sectional_milnor(g: GermRecord | Polynomial, k: int = 1, seed: int = 0) -> int:
    """Milnor number of a generic codimension-``k`` linear section through the point.

    Draws random sections until the smallest value seen has occurred three times (the
    generic value is the minimum by semicontinuity), using at most nine draws.
    """
    germ = _germ(g)
    N = germ.num_vars
    if not 1 <= k <= N - 1:
        raise InvariantError(f"section codimension must lie in 1..{N - 1}")
    rnd = random.Random(seed * 7919 + k)
    values = []
    for _ in range(SECTION_DRAWS):
        h = _random_section(germ.f, k, rnd)
        if h.is_zero or h.order < 2:
            values.append(None)
            continue
        try:
            values.append(milnor_number(h, check=False))
        except InvariantError:
            values.append(None)
        seen = [v for v in values if v is not None]
        if seen and seen.count(min(seen)) >= SECTION_AGREE:
            return min(seen)
    raise InvariantError(f"random sections never agreed: {values}")


def euler_obstruction(g: GermRecord, seed: int = 0) -> int:
    n = _germ(g).dim
    return 1 - (-1) ** n * sectional_milnor(g, 1, seed=seed)


def specialization_sigma(g: GermRecord) -> int:
    n = _germ(g).dim
    return 1 + (-1) ** n * milnor_number(g)


# ---------------------------------------------------------------------------------------
# smooth hypersurfaces


def _chern_series(N: int, d: int) -> list[int]:
    """Coefficients of ``(1+h)^{N+1} / (1+d h)`` up to ``h^{N-1}``."""
    n = N - 1
    return [sum(comb(N + 1, j) * (-d) ** (i - j) for j in range(i + 1)) for i in range(n + 1)]


def chi_smooth_hypersurface(N: int, d: int) -> int:
    """Euler characteristic of a smooth degree-``d`` hypersurface in ``P^N``."""
    if d < 1 or N < 2:
        raise ValueError("need d >= 1 and N >= 2")
    return d * _chern_series(N, d)[N - 1]


def chern_numbers_smooth(N: int, d: int, partition: Sequence[int]) -> int:
    """``int c_{i_1} ... c_{i_r}`` over a smooth degree-``d`` hypersurface in ``P^N``."""
    n = N - 1
    parts = [int(i) for i in partition if i]
    if any(i < 0 for i in partition) or sum(parts) != n:
        raise ValueError(f"{tuple(partition)} is not a partition of {n}")
    c = _chern_series(N, d)
    return d * prod((c[i] for i in parts), start=1)


# ---------------------------------------------------------------------------------------
# predictions for hypersurfaces with isolated singularities


def _degree(F: Polynomial) -> tuple[int, int]:
    if not F.is_homogeneous:
        raise InvariantError("F must be homogeneous")
    return F.num_vars - 1, F.degree


def singularity_records(F: Polynomial, sings: Sequence, seed: int = 0) -> list[SingularityRecord]:
    recs = []
    for p in sings:
        if isinstance(p, SingularityRecord):
            recs.append(p)
            continue
        g = p if isinstance(p, GermRecord) else GermRecord.from_projective(F, p)
        recs.append(SingularityRecord.from_germ(g, seed=seed))
    return recs


def check_smooth_elsewhere(F: Polynomial, sings: Sequence, samples: int = 1000, seed: int = 0,
                           clearance: float = 1e-3, newton_steps: int = 40) -> None:
    """Spot check that ``{F = 0}`` has no singular points besides the declared ones.

    Points are sampled on random lines.  Their gradients must not vanish, and Newton's
    method for ``grad F = 0`` (on the unit sphere) started from them must not converge
    anywhere except at the declared points.
    """
    from .curvature.batch import Hypersurface
    from .sampler.lines import fs_distance, haar_frames, intersect_lines

    surf = Hypersurface(F)
    rng = np.random.default_rng([seed, 1009])
    a, b = haar_frames(rng, surf.N, max(1, samples // surf.degree))
    pts = intersect_lines(surf, a, b).points.reshape(-1, surf.N + 1)
    declared = [np.array([complex(x) for x in (p.projective_point if isinstance(p, GermRecord)
                                               else p.point if isinstance(p, SingularityRecord)
                                               else p)]) for p in sings]

    def far_from_declared(P):
        far = np.ones(len(P), dtype=bool)
        for q in declared:
            far &= fs_distance(P, q) > clearance
        return far

    tol = 1e-9 * surf.coefficient_scale
    gn = surf.gradient_norm(pts[far_from_declared(pts)])
    if len(gn) and np.min(gn) < tol:
        raise InvariantError("an undeclared singular point appears among sampled points")
    if surf.degree < 2:
        return
    X = pts[np.all(np.isfinite(pts), axis=1)]
    for _ in range(newton_steps):
        _, G, H = surf.compiled.value_grad_hess(X)
        # H dx = -G with dx orthogonal to x (fixes the projective scaling)
        A = np.concatenate([H, np.conj(X)[:, None, :]], axis=1)
        rhs = np.concatenate([-G, np.zeros((len(X), 1))], axis=1)
        dx = np.linalg.lstsq(A[0], rhs[0], rcond=None)[0][None] if len(X) == 1 else \
            np.einsum("mij,mj->mi", np.linalg.pinv(A), rhs)
        X = X + dx
        X /= np.linalg.norm(X, axis=1, keepdims=True)
    _, G = surf.compiled.value_grad(X)
    crit = np.linalg.norm(G, axis=1) < tol
    if np.any(crit & far_from_declared(X)):
        bad = X[crit & far_from_declared(X)][0]
        raise InvariantError(f"undeclared singular point near {np.round(bad, 6).tolist()}")


def gauss_bonnet_prediction(F: Polynomial, sings: Sequence, check: bool = True,
                            seed: int = 0) -> int:
    """``chi(X) + sum Eu_p`` with ``chi(X) = chi_smooth - sum sigma_p``."""
    N, d = _degree(F)
    recs = singularity_records(F, sings, seed)
    if check:
        check_smooth_elsewhere(F, sings, seed=seed)
    return chi_smooth_hypersurface(N, d) - sum(r.sigma for r in recs) + sum(r.eu for r in recs)


def euler_characteristic(F: Polynomial, sings: Sequence, seed: int = 0) -> int:
    N, d = _degree(F)
    return chi_smooth_hypersurface(N, d) - sum(r.sigma for r in singularity_records(F, sings, seed))


def tube_prediction(F: Polynomial, sings: Sequence, seed: int = 0) -> int:
    """Limit of the curvature integral of nearby smooth fibers inside the tube:
    ``sum (sigma_p - Eu_p) = (-1)^n sum (mu_p + mu_p^section)``."""
    _degree(F)
    recs = singularity_records(F, sings, seed)
    return sum(r.sigma - r.eu for r in recs)


def telescoping_prediction(g: GermRecord | SingularityRecord) -> int:
    """``(-1)^n mu - m + 1``."""
    if isinstance(g, SingularityRecord):
        return (-1) ** g.dim * g.mu - g.m + 1
    germ = _germ(g)
    return (-1) ** germ.dim * milnor_number(germ) - multiplicity(germ) + 1


def beta_combinatorial(F: Polynomial, sings: Sequence, r: int, seed: int = 0) -> int:
    """Gauss-Bonnet integral of a generic codimension-``r`` linear section."""
    N, d = _degree(F)
    n = N - 1
    if not 0 <= r <= n:
        raise ValueError(f"r must lie in 0..{n}")
    if r == 0:
        return gauss_bonnet_prediction(F, sings, seed=seed)
    if r == n:
        return d
    return chi_smooth_hypersurface(N - r, d)
