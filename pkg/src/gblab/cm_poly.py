"""The Pfaffian and Mather-Chern polynomials of a projective variety and the involution
``I(p)(t) = (p(0) + t p(-1-t)) / (1+t)`` that exchanges them.

``Pf(t) = sum_r beta_r (-t)^r`` collects Gauss-Bonnet integrals of generic linear
sections; ``CM(t) = sum_r deg(c_r^M) t^r`` collects Mather-Chern degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class DegreePolynomial:
    """Polynomial in ``t`` with exact rational coefficients and a fixed formal degree."""

    coeffs: tuple

    def __init__(self, coeffs: Sequence, degree: int | None = None):
        c = [Fraction(x) for x in coeffs]
        if degree is not None:
            if any(c[degree + 1:]):
                raise ValueError(f"coefficients beyond formal degree {degree}")
            c = (c + [Fraction(0)] * (degree + 1))[:degree + 1]
        if not c:
            raise ValueError("need at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t):
        acc = Fraction(0) if isinstance(t, (int, Fraction)) else 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def integers(self) -> list[int]:
        if not self.is_integral():
            raise ValueError(f"{self} has non-integer coefficients")
        return [int(c) for c in self.coeffs]

    def __str__(self):
        out = ""
        for k, c in enumerate(self.coeffs):
            if c == 0 and (k or self.degree):
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            mag = abs(c)
            body = f"{mag}*{mono}" if mono and mag != 1 else (mono or f"{mag}")
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out or "0"


def involution_I(p: DegreePolynomial) -> DegreePolynomial:
    """``(p(0) + t p(-1-t)) / (1+t)``, by exact synthetic division."""
    n = p.degree
    # coefficients of p(-1-t) = sum_k c_k (-1)^k (1+t)^k
    q = [Fraction(0)] * (n + 1)
    for k, c in enumerate(p.coeffs):
        s = c * (-1) ** k
        for j in range(k + 1):
            q[j] += s * comb(k, j)
    num = [p.coeffs[0]] + [Fraction(0)] * (n + 1)
    for j, c in enumerate(q):
        num[j + 1] += c
    # divide by (1 + t), highest degree first
    out = [Fraction(0)] * (n + 1)
    rem = num[:]
    for k in range(n + 1, 0, -1):
        out[k - 1] = rem[k]
        rem[k - 1] -= rem[k]
        rem[k] = Fraction(0)
    if rem[0] != 0:
        raise ArithmeticError("numerator not divisible by 1+t (internal error)")
    return DegreePolynomial(out, n)


def involution_matrix(n: int) -> np.ndarray:
    """Matrix of the (linear) involution on coefficient vectors of formal degree ``n``."""
    cols = []
    for k in range(n + 1):
        e = [0] * (n + 1)
        e[k] = 1
        cols.append([float(c) for c in involution_I(DegreePolynomial(e, n)).coeffs])
    return np.array(cols).T


def pf_from_betas(betas: Sequence, dim: int | None = None) -> DegreePolynomial:
    """``sum_r beta_r (-t)^r``."""
    if dim is not None and len(betas) != dim + 1:
        raise ValueError(f"need {dim + 1} section integrals, got {len(betas)}")
    return DegreePolynomial([Fraction(b) * (-1) ** r for r, b in enumerate(betas)])


def cm_from_pf(pf: DegreePolynomial) -> DegreePolynomial:
    return involution_I(pf)


def pf_from_cm(cm: DegreePolynomial) -> DegreePolynomial:
    return involution_I(cm)


def cm_from_betas(betas: Sequence) -> DegreePolynomial:
    return cm_from_pf(pf_from_betas(betas))


def numeric_cm_from_betas(means: Sequence[float], stderrs: Sequence[float]
                          ) -> tuple[np.ndarray, np.ndarray]:
    """Mather-Chern degrees from numeric section integrals, with propagated standard errors
    (the estimates are independent, one Monte Carlo run per section)."""
    n = len(means) - 1
    signs = np.array([(-1.0) ** r for r in range(n + 1)])
    M = involution_matrix(n) * signs[None, :]
    mean = M @ np.asarray(means, dtype=float)
    err = np.sqrt((M ** 2) @ np.asarray(stderrs, dtype=float) ** 2)
    return mean, err


@dataclass(frozen=True)
class CoefficientComparison:
    index: int
    numeric: float
    stderr: float
    exact: float
    z: float
    passed: bool


@dataclass(frozen=True)
class PipelineComparison:
    rows: tuple
    sigma_level: float
    source: str = ""

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def compare_pipelines(numeric: Sequence, combinatorial: DegreePolynomial, sigma_level: float = 3.0,
                      source: str = "crofton") -> PipelineComparison:
    """Per-coefficient z-scores of numeric estimates (``mean``/``stderr`` objects or pairs)
    against exact coefficients."""
    if len(numeric) != combinatorial.degree + 1:
        raise ValueError("numeric estimates and polynomial have different degrees")
    rows = []
    for i, (est, exact) in enumerate(zip(numeric, combinatorial.coeffs)):
        mean, err = (est.mean, est.stderr) if hasattr(est, "mean") else est
        diff = mean - float(exact)
        if err > 0:
            z = diff / err
        else:
            z = 0.0 if diff == 0 else float("inf")
        rows.append(CoefficientComparison(i, float(mean), float(err), float(exact), float(z),
                                          abs(z) <= sigma_level))
    return PipelineComparison(tuple(rows), sigma_level, source)
