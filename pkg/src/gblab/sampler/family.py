"""Tube integrals over smoothing families ``F_delta = F0 + delta*G`` and epsilon extrapolation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..algebra import Polynomial
from ..curvature.batch import Hypersurface
from .crofton import CHUNK_SIZE, IntegralEstimate, MultiEstimate, crofton_integrate_many
from .lines import haar_frames, intersect_lines
from .tubes import TubeSpec

log = logging.getLogger(__name__)

PLATEAU_SIGMAS = 2.0
DELTA_RATIO = 1e-2
SCAN_COLUMNS = ("epsilon", "delta", "mean", "stderr", "lines", "resampled")


class FamilyError(ValueError):
    """A family member is singular or the declared singular set is wrong."""


@dataclass(frozen=True)
class Plateau:
    epsilon: float
    found: bool
    value: IntegralEstimate | None
    delta: float | None
    members: tuple = ()
    max_step: float = float("nan")


@dataclass(frozen=True)
class EpsilonFit:
    """``I(eps) ~ sum_k coef_k eps^powers_k``; ``intercept`` is the ``eps -> 0`` value."""

    powers: tuple
    epsilons: tuple
    intercept: IntegralEstimate
    coefficients: tuple
    residual: float
    chi2: float
    delta: float | None = None


@dataclass
class FamilyScan:
    epsilons: tuple
    deltas: tuple
    side: str
    table: dict = field(default_factory=dict)        # (eps, delta) -> IntegralEstimate
    runs: dict = field(default_factory=dict)         # delta -> MultiEstimate
    plateaus: dict = field(default_factory=dict)     # eps -> Plateau
    fit: EpsilonFit | None = None

    def rows(self) -> list[tuple]:
        out = []
        for (e, d), est in sorted(self.table.items()):
            out.append((e, d, est.mean, est.stderr, est.lines_used, est.resampled_lines))
        return out


def family_member(F0: Polynomial, G: Polynomial, delta) -> Polynomial:
    """``F0 + delta*G`` with ``delta`` converted to an exact rational."""
    q = delta if isinstance(delta, Fraction) else Fraction(delta).limit_denominator(10 ** 15)
    return F0 + G * q


def check_smoothing(F0: Polynomial, Fd: Polynomial, sings: Sequence, samples: int = 200,
                    seed: int = 0) -> None:
    """Spot checks: declared points are singular on ``F0`` and not on ``Fd``; ``Fd`` has no
    vanishing gradient at sampled points."""
    for p in sings:
        p = list(p)
        if F0.evaluate(p) != 0 or any(g.evaluate(p) != 0 for g in F0.gradient()):
            raise FamilyError(f"{p} is not a singular point of the central fiber")
        if Fd.evaluate(p) == 0 and all(g.evaluate(p) == 0 for g in Fd.gradient()):
            raise FamilyError(f"{p} stays singular on the family member")
    surf = Hypersurface(Fd)
    rng = np.random.default_rng([seed, 7])
    a, b = haar_frames(rng, surf.N, samples)
    pts = intersect_lines(surf, a, b).points.reshape(-1, surf.N + 1)
    gn = surf.gradient_norm(pts)
    if np.min(gn) < 1e-12 * surf.coefficient_scale:
        raise FamilyError("family member looks singular at a sampled point")


def detect_plateau(epsilon: float, estimates: Sequence[tuple[float, IntegralEstimate]],
                   sigmas: float = PLATEAU_SIGMAS) -> Plateau:
    """Walk from the smallest delta upward while consecutive values agree within
    ``sigmas`` combined standard errors; report the largest-delta member."""
    pts = sorted(estimates, key=lambda de: de[0])
    if not pts:
        return Plateau(epsilon, False, None, None)
    members = [pts[0]]
    steps = []
    for prev, cur in zip(pts, pts[1:]):
        step = abs(cur[1].mean - prev[1].mean)
        if step > sigmas * np.hypot(cur[1].stderr, prev[1].stderr):
            break
        steps.append(step)
        members.append(cur)
    found = len(members) >= 2
    d, est = members[-1]
    return Plateau(epsilon, found, est, d, tuple(m[0] for m in members),
                   max(steps) if steps else float("nan"))


def _design(eps: Sequence[float], powers: Sequence[int]) -> np.ndarray:
    return np.array([[e ** p for p in powers] for e in eps], dtype=float)


def extrapolate_epsilon(epsilons: Sequence[float], values, errors=None,
                        powers: Sequence[int] = (0, 2)) -> tuple[float, float, np.ndarray, float]:
    """Weighted least-squares fit of ``values`` in powers of epsilon.

    Returns ``(intercept, intercept_stderr, coefficients, chi2)`` treating the values
    as independent.  ``powers`` must start with 0.
    """
    if powers[0] != 0:
        raise ValueError("first power must be 0 (the intercept)")
    eps = np.asarray(epsilons, dtype=float)
    y = np.asarray(values, dtype=float)
    if len(eps) < len(powers):
        raise ValueError("need at least as many epsilons as fit terms")
    s = np.ones_like(y) if errors is None else np.asarray(errors, dtype=float)
    s = np.where(s > 0, s, 1.0)
    A = _design(eps, powers) / s[:, None]
    coef, *_ = np.linalg.lstsq(A, y / s, rcond=None)
    cov = np.linalg.pinv(A.T @ A)
    chi2 = float(np.sum((A @ coef - y / s) ** 2))
    return float(coef[0]), float(np.sqrt(cov[0, 0])), coef, chi2


def intercept_weights(epsilons: Sequence[float], powers: Sequence[int] = (0, 2)) -> np.ndarray:
    """Weights ``w`` with ``intercept = w @ values`` for the unweighted fit."""
    A = _design(epsilons, powers)
    return np.linalg.pinv(A)[0]


def fit_shared(run: MultiEstimate, epsilons: Sequence[float], index: dict,
               powers: Sequence[int] = (0, 2), delta: float | None = None) -> EpsilonFit:
    """Epsilon fit on estimates from one shared-line run: the intercept is a fixed linear
    combination of per-line sums, so its standard error accounts for the correlation."""
    w_sub = intercept_weights(epsilons, powers)
    w = np.zeros(len(run))
    for e, wk in zip(epsilons, w_sub):
        w[index[e]] += wk
    icpt = run.combine(w, label="epsilon->0")
    vals = np.array([run.means[index[e]] for e in epsilons])
    coef = np.linalg.lstsq(_design(epsilons, powers), vals, rcond=None)[0]
    resid = float(np.max(np.abs(_design(epsilons, powers) @ coef - vals)))
    errs = np.array([np.sqrt(run.cov[index[e], index[e]]) for e in epsilons])
    chi2 = float(np.sum(((_design(epsilons, powers) @ coef - vals) / errs) ** 2))
    return EpsilonFit(tuple(powers), tuple(epsilons), icpt, tuple(float(c) for c in coef), resid,
                      chi2, delta)


def family_tube_scan(F0: Polynomial, G: Polynomial, sings: Sequence, deltas: Sequence[float],
                     epsilons: Sequence[float], integrand, side: str = "inside",
                     shape: str = "polydisk", chart: int | None = None, lines: int = 1_000_000,
                     seed: int = 0, workers: int = 1, delta_ratio: float = DELTA_RATIO,
                     fit_epsilons: Sequence[float] | None = None, fit_powers=(0, 2),
                     chunk_size: int = CHUNK_SIZE) -> FamilyScan:
    """Scan ``I(delta, eps)`` = integral of ``integrand`` over ``X_delta`` inside (or outside)
    the ``eps``-tube around ``sings``.

    Every delta is one shared-line pass (same seed) covering all epsilons at once.  For each
    epsilon the plateau search uses the grid deltas with ``delta <= delta_ratio * eps^2``.
    The optional fit uses the single largest delta admissible for every fit epsilon.
    """
    eps_all = sorted(set(float(e) for e in epsilons) | set(float(e) for e in fit_epsilons or ()))
    centers = tuple(tuple(p) for p in sings)
    if shape == "polydisk" and chart is None:
        chart = _chart_of(centers)
    tubes = [TubeSpec(centers, e, shape, chart) for e in eps_all]
    index = {e: i for i, e in enumerate(eps_all)}
    scan = FamilyScan(tuple(float(e) for e in epsilons), tuple(sorted(float(d) for d in deltas)),
                      side)
    for d in scan.deltas:
        Fd = family_member(F0, G, d)
        check_smoothing(F0, Fd, sings, seed=seed)
        run = crofton_integrate_many(Fd, integrand, [(t, side) for t in tubes], lines, seed,
                                     workers, chunk_size,
                                     labels=tuple(f"eps={e:g}" for e in eps_all),
                                     check_centers=False)
        scan.runs[d] = run
        for e in eps_all:
            scan.table[(e, d)] = run[index[e]]
        log.info("delta=%g done", d)
    for e in eps_all:
        admissible = [(d, scan.table[(e, d)]) for d in scan.deltas if d <= delta_ratio * e * e]
        p = detect_plateau(e, admissible)
        if not p.found:
            log.warning("no delta plateau for eps=%g", e)
        scan.plateaus[e] = p
    if fit_epsilons:
        fe = sorted(float(e) for e in fit_epsilons)
        ok = [d for d in scan.deltas if d <= delta_ratio * fe[0] ** 2]
        if ok:
            d = max(ok)
            scan.fit = fit_shared(scan.runs[d], fe, index, fit_powers, delta=d)
        else:
            log.warning("no grid delta is admissible for every fit epsilon")
    return scan


EXCISION_EPSILONS = (0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.3)
EXCISION_POWERS = (0, 1, 2)
EXCISION_SHRINK = 0.2
EXCISION_REFINEMENTS = 2
MAX_CHI2_PER_DOF = 1.0


@dataclass(frozen=True)
class ExcisedIntegral:
    """Integral over the complement of shrinking Fubini-Study balls, extrapolated to 0."""

    fit: EpsilonFit
    run: MultiEstimate
    epsilons: tuple
    refinements: int = 0

    @property
    def estimate(self) -> IntegralEstimate:
        return self.fit.intercept

    def rows(self) -> list[tuple]:
        return [(e, self.run.means[i], float(np.sqrt(self.run.cov[i, i])))
                for i, e in enumerate(self.epsilons)]


def excised_integral(F, integrand, sings: Sequence, epsilons: Sequence[float] = EXCISION_EPSILONS,
                     powers: Sequence[int] = EXCISION_POWERS, lines: int = 1_000_000,
                     seed: int = 0, workers: int = 1, chunk_size: int = CHUNK_SIZE,
                     max_chi2_per_dof: float = MAX_CHI2_PER_DOF,
                     refinements: int = EXCISION_REFINEMENTS) -> ExcisedIntegral:
    """``lim_{eps->0}`` of the integral outside the ``eps``-balls around ``sings``.

    All radii share the same lines, and the intercept of the fit in ``powers`` of eps is a
    fixed linear combination of per-line sums, so its standard error is exact.  The
    default model ``a + b eps + c eps^2`` allows for the ``O(eps)`` approach seen at cusps.

    If the fit misses by more than the per-radius standard errors (chi2 per degree of
    freedom above ``max_chi2_per_dof``, errors taken as independent), some radius reaches
    a curvature feature near the point; the grid is then shrunk by ``EXCISION_SHRINK``
    and rerun, at most ``refinements`` times.
    """
    eps = tuple(sorted(float(e) for e in epsilons))
    centers = tuple(tuple(p) for p in sings)
    dof = max(len(eps) - len(powers), 1)
    for k in range(refinements + 1):
        run = crofton_integrate_many(F, integrand, [(TubeSpec(centers, e), "outside") for e in eps],
                                     lines, seed, workers, chunk_size,
                                     labels=tuple(f"outside eps={e:g}" for e in eps))
        fit = fit_shared(run, eps, {e: i for i, e in enumerate(eps)}, powers)
        if fit.chi2 <= max_chi2_per_dof * dof or k == refinements:
            break
        log.info("excision fit chi2 %.3g on radii up to %g; shrinking", fit.chi2, eps[-1])
        eps = tuple(e * EXCISION_SHRINK for e in eps)
    if fit.chi2 > max_chi2_per_dof * dof:
        log.warning("excision fit still inconsistent (chi2 %.3g) at radii up to %g",
                    fit.chi2, eps[-1])
    return ExcisedIntegral(fit, run, eps, k)


def _chart_of(centers) -> int:
    c = np.array([[abs(complex(x)) for x in p] for p in centers])
    return int(np.argmax(c.min(axis=0)))


def chart_for(centers) -> int:
    """Affine chart containing all centers (largest minimal coordinate modulus)."""
    return _chart_of(tuple(tuple(p) for p in centers))
