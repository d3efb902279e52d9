"""Restriction of a hypersurface to Haar-random linear subspaces."""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from ..algebra import Polynomial
from ..curvature.batch import Hypersurface
from .lines import _complex_normal, haar_frames, intersect_lines

log = logging.getLogger(__name__)

SINGULAR_CLEARANCE = 1e-8
MAX_REDRAWS = 50


class SectionError(RuntimeError):
    pass


def _frame(rng: np.random.Generator, N: int, k: int) -> np.ndarray:
    """Orthonormal ``(N+1) x k`` frame of a unitary-invariant ``k``-dimensional subspace."""
    Z = _complex_normal(rng, (N + 1, k))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def restrict(F: Polynomial, Q: np.ndarray) -> Polynomial:
    """``F(Q y)`` as a polynomial in the ``Q.shape[1]`` coordinates ``y``."""
    k = Q.shape[1]
    images = []
    for row in Q:
        terms = {}
        for j in range(k):
            if row[j] != 0:
                e = [0] * k
                e[j] = 1
                terms[tuple(e)] = complex(row[j])
        images.append(Polynomial(k, terms))
    return F.substitute(images)


def linear_section(F: Polynomial, r: int, rng: np.random.Generator,
                   sings: Sequence = (), checks: int = 100) -> Polynomial:
    """Restriction of ``F`` (in ``P^N``) to a random codimension-``r`` subspace ``P^{N-r}``.

    Subspaces passing within ``SINGULAR_CLEARANCE`` of a declared singular point are
    redrawn.  When the section has positive dimension its smoothness is spot-checked
    at ``checks`` points on random lines.
    """
    N = F.num_vars - 1
    if not 1 <= r <= N - 1:
        raise ValueError(f"codimension must lie in 1..{N - 1}")
    k = N + 1 - r
    S = np.array([[complex(x) for x in p] for p in sings], dtype=complex).reshape(-1, N + 1)
    if len(S):
        S /= np.linalg.norm(S, axis=1, keepdims=True)
    for attempt in range(MAX_REDRAWS):
        Q = _frame(rng, N, k)
        if len(S):
            off = np.linalg.norm(S - (S @ Q.conj()) @ Q.T, axis=1)
            if np.min(off) < SINGULAR_CLEARANCE:
                log.debug("section redraw %d: too close to a singular point", attempt + 1)
                continue
        section = restrict(F, Q)
        if k >= 3 and checks:
            surf = Hypersurface(section)
            a, b = haar_frames(rng, surf.N, max(1, checks // max(section.degree, 1)))
            pts = intersect_lines(surf, a, b).points.reshape(-1, k)
            if np.min(surf.gradient_norm(pts)) < SINGULAR_CLEARANCE * surf.coefficient_scale:
                log.debug("section redraw %d: smoothness spot-check failed", attempt + 1)
                continue
        return section
    raise SectionError(f"no admissible section after {MAX_REDRAWS} draws")


def binary_roots(B: Polynomial) -> int:
    """Number of distinct roots of a binary form (the point count of a 0-dimensional section)."""
    if B.num_vars != 2:
        raise ValueError("expected a binary form")
    surf = Hypersurface(B)
    a = np.array([[1.0, 0.0]], dtype=complex)
    b = np.array([[0.0, 1.0]], dtype=complex)
    inter = intersect_lines(surf, a, b)
    if inter.resample[0]:
        raise SectionError("binary form has (nearly) repeated roots")
    return surf.degree
