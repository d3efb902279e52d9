"""Crofton-formula Monte Carlo integration over projective hypersurfaces.

For an ``n``-dimensional hypersurface ``X`` in ``P^{n+1}`` and a Haar-random line ``L``,

    int_X h dvol = vol(P^n) * E_L[ sum_{p in X cap L} h(p) ],   vol(P^n) = pi^n / n!

in the Fubini-Study convention of :mod:`gblab.curvature`.  Lines are processed in
fixed-size chunks, each with its own generator seeded by ``(seed, chunk)``, and the
per-chunk moments are merged in chunk order, so results do not depend on the number
of worker threads.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import factorial, pi, sqrt
from typing import Callable, Sequence

import numpy as np

from ..algebra import Polynomial
from ..curvature.batch import Hypersurface
from .lines import haar_frames, intersect_lines
from .tubes import TubeSpec, tube_filter

log = logging.getLogger(__name__)

CHUNK_SIZE = 8192
MAX_RESAMPLE_ROUNDS = 20
MAX_RESAMPLE_RATE = 1e-3
ROUNDOFF = 1e-12


class ResampleError(RuntimeError):
    """Too many ill-conditioned lines (e.g. a non-reduced hypersurface)."""


def projective_volume(n: int) -> float:
    return pi ** n / factorial(n)


@dataclass(frozen=True)
class IntegralEstimate:
    mean: float
    stderr: float
    lines_used: int
    points_used: int
    resampled_lines: int
    seed: int
    label: str = ""

    @property
    def resample_rate(self) -> float:
        return self.resampled_lines / self.lines_used if self.lines_used else 0.0

    def z(self, exact: float) -> float:
        """Standardized error; the error is floored at double-precision roundoff so that
        zero-variance integrands (e.g. homogeneous spaces) do not produce huge z-scores."""
        return (self.mean - exact) / max(self.stderr, ROUNDOFF * max(1.0, abs(exact)))

    def __str__(self):
        return f"{self.label or 'integral'} = {self.mean:.6g} +- {self.stderr:.2g} ({self.lines_used} lines)"


@dataclass
class _Moments:
    """Running count, mean vector and co-moment matrix of per-line sums."""

    k: int
    n: int = 0
    mean: np.ndarray = field(default=None)
    M2: np.ndarray = field(default=None)
    points: int = 0
    resampled: int = 0

    def __post_init__(self):
        if self.mean is None:
            self.mean = np.zeros(self.k)
            self.M2 = np.zeros((self.k, self.k))

    @classmethod
    def from_samples(cls, Y: np.ndarray, points: int, resampled: int) -> "_Moments":
        mu = Y.mean(axis=0)
        D = Y - mu
        return cls(k=Y.shape[1], n=len(Y), mean=mu, M2=D.T @ D, points=points,
                   resampled=resampled)

    def merge(self, other: "_Moments") -> "_Moments":
        n = self.n + other.n
        if n == 0:
            return self
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.n / n)
        M2 = self.M2 + other.M2 + np.outer(delta, delta) * (self.n * other.n / n)
        return _Moments(self.k, n, mean, M2, self.points + other.points,
                        self.resampled + other.resampled)


@dataclass(frozen=True)
class MultiEstimate:
    """Estimates of several filtered integrals that share the same lines."""

    means: np.ndarray
    cov: np.ndarray          # covariance of the estimates (already divided by lines)
    lines_used: int
    points_used: int
    resampled_lines: int
    seed: int
    labels: tuple = ()

    def __len__(self):
        return len(self.means)

    def __getitem__(self, i: int) -> IntegralEstimate:
        return self.combine(np.eye(len(self.means))[i], self.labels[i] if self.labels else "")

    def combine(self, weights, label: str = "") -> IntegralEstimate:
        """Estimate of a fixed linear combination, with its exact shared-line standard error."""
        w = np.asarray(weights, dtype=float)
        var = float(w @ self.cov @ w)
        return IntegralEstimate(float(w @ self.means), sqrt(max(var, 0.0)), self.lines_used,
                                self.points_used, self.resampled_lines, self.seed, label)

    def estimates(self) -> list[IntegralEstimate]:
        return [self[i] for i in range(len(self))]


Mask = Callable[[np.ndarray], np.ndarray]


def _chunk(surface: Hypersurface, integrand, masks: Sequence[Mask | None], seed: int,
           chunk: int, count: int) -> _Moments:
    rng = np.random.default_rng([seed, chunk])
    N = surface.N
    a, b = haar_frames(rng, N, count)
    inter = intersect_lines(surface, a, b)
    P, bad = inter.points, inter.resample
    resampled = 0
    for _ in range(MAX_RESAMPLE_ROUNDS):
        nbad = int(bad.sum())
        if not nbad:
            break
        resampled += nbad
        a2, b2 = haar_frames(rng, N, nbad)
        redo = intersect_lines(surface, a2, b2)
        P[bad] = redo.points
        idx = np.flatnonzero(bad)
        bad = np.zeros_like(bad)
        bad[idx] = redo.resample
    else:
        raise ResampleError(f"lines stay ill-conditioned after {MAX_RESAMPLE_ROUNDS} redraws; "
                            "is the hypersurface reduced?")
    M, d = P.shape[:2]
    flat = P.reshape(M * d, -1)
    sel = [np.ones(M * d, dtype=bool) if m is None else np.asarray(m(flat)) for m in masks]
    need = np.logical_or.reduce(sel)
    h = np.zeros(M * d)
    if np.any(need):
        h_need = np.asarray(integrand(surface, flat[need]), dtype=float)
        if not np.all(np.isfinite(h_need)):
            j = int(np.flatnonzero(~np.isfinite(h_need))[0])
            raise FloatingPointError(f"integrand is not finite at point {flat[need][j]}")
        h[need] = h_need
    Y = np.stack([(h * s).reshape(M, d).sum(axis=1) for s in sel], axis=1)
    return _Moments.from_samples(Y, int(need.sum()), resampled)


def crofton_integrate_many(F: Polynomial | Hypersurface, integrand,
                           filters: Sequence[tuple[TubeSpec | None, str]] = ((None, "inside"),),
                           lines: int = 100_000, seed: int = 0, workers: int = 1,
                           chunk_size: int = CHUNK_SIZE, labels: Sequence[str] = (),
                           check_centers: bool = True) -> MultiEstimate:
    """Integrals of ``integrand`` restricted by each ``(tube, side)`` filter on shared lines.

    ``check_centers=False`` skips the exact test that tube centers lie on ``F``; family
    scans use it because the centers sit on the central fiber, not on ``F_delta``.
    """
    surface = F if isinstance(F, Hypersurface) else Hypersurface(F)
    integrand.check(surface)
    if lines < 2:
        raise ValueError("need at least two lines for a standard error")
    masks = [tube_filter(t, side) for t, side in filters]
    for t, _ in filters:
        if t is not None and check_centers:
            t.validate_on(surface.polynomial)
    sizes = [chunk_size] * (lines // chunk_size)
    if lines % chunk_size:
        sizes.append(lines % chunk_size)

    def job(i):
        return _chunk(surface, integrand, masks, seed, i, sizes[i])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    total = _Moments(len(masks))
    for p in parts:
        total = total.merge(p)
    vol = projective_volume(surface.n)
    cov = total.M2 / (total.n - 1) * vol ** 2 / total.n
    rate = total.resampled / total.n
    if rate >= MAX_RESAMPLE_RATE:
        raise ResampleError(f"resample rate {rate:.2e} exceeds {MAX_RESAMPLE_RATE:g}")
    if total.resampled:
        log.debug("resampled %d of %d lines", total.resampled, total.n)
    return MultiEstimate(means=total.mean * vol, cov=cov, lines_used=total.n,
                         points_used=total.points, resampled_lines=total.resampled, seed=seed,
                         labels=tuple(labels))


def crofton_integrate(F: Polynomial | Hypersurface, integrand, tube: TubeSpec | None = None,
                      side: str = "inside", lines: int = 100_000, seed: int = 0,
                      workers: int = 1, chunk_size: int = CHUNK_SIZE,
                      label: str = "", check_centers: bool = True) -> IntegralEstimate:
    """Monte Carlo estimate of ``int h dvol`` over the hypersurface, optionally restricted to
    the inside or outside of ``tube``."""
    est = crofton_integrate_many(F, integrand, [(tube, side)], lines, seed, workers, chunk_size,
                                 labels=(label,), check_centers=check_centers)
    return est[0]
