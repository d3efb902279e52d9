"""Experiment runners: each turns a validated scenario into a :class:`Report`."""

from __future__ import annotations

import logging
import random
import time
from itertools import combinations_with_replacement

import numpy as np

from .. import invariants as inv
from ..algebra import AffineMap, linear_substitute
from ..cm_poly import (cm_from_betas, cm_from_pf, involution_I, numeric_cm_from_betas,
                       pf_from_betas)
from ..curvature import ChernIntegrand, gauss_bonnet_integrand, mather_degree_integrand
from ..sampler import (SCAN_COLUMNS, TubeSpec, binary_roots, chart_for, crofton_integrate,
                       crofton_integrate_many, excised_integral, family_tube_scan,
                       linear_section)
from .report import Quantity, Report, Table
from .scenario import DEFAULT_EPSILONS, ScenarioConfig

log = logging.getLogger(__name__)

MAX_EMBEDDING_CONDITION = 4.0


def partitions(n: int) -> list[tuple[int, ...]]:
    """Partitions of ``n`` as non-increasing tuples, starting with ``(n,)``."""
    out = []
    for k in range(1, n + 1):
        for c in combinations_with_replacement(range(n, 0, -1), k):
            if sum(c) == n:
                out.append(c)
    return out


class _Context:
    def __init__(self, cfg: ScenarioConfig, workers: int):
        self.cfg = cfg
        self.workers = workers
        self.report = Report(scenario=cfg.canonical(), scenario_hash=cfg.content_hash(),
                             seed=cfg.seed, experiment=cfg.experiment)
        self.resampled = 0
        self.lines_total = 0

    def tol(self, exact: float | None, singular: bool = False) -> float:
        t = self.cfg.tolerances
        rel = float(t.get("rel_tol", 0.05 if singular else 0.0))
        return max(float(t.get("abs_tol", 0.0)), rel * abs(exact or 0.0))

    def add(self, name, est=None, exact=None, mean=None, stderr=0.0, oracle="exact",
            singular=False, abs_tol=None, reference_stderr=0.0) -> Quantity:
        if est is not None:
            mean, stderr = est.mean, est.stderr
            self.resampled += est.resampled_lines
            self.lines_total += est.lines_used
        q = Quantity(name=name, mean=float(mean), stderr=float(stderr),
                     exact=None if exact is None else float(exact), oracle=oracle,
                     sigma_level=self.cfg.sigma_level,
                     abs_tol=self.tol(exact, singular) if abs_tol is None else abs_tol,
                     reference_stderr=reference_stderr)
        return self.report.add(q)

    def integral(self, integrand, label: str, seed_offset: int = 0, F=None, sings=None):
        """Integral over the hypersurface; singular varieties go through excision."""
        cfg = self.cfg
        F = cfg.polynomial if F is None else F
        sings = cfg.singular_points if sings is None else sings
        seed = cfg.seed + seed_offset
        if not sings:
            return crofton_integrate(F, integrand, lines=cfg.lines, seed=seed,
                                     workers=self.workers, label=label), None
        eps = cfg.tube.get("epsilons") or DEFAULT_EPSILONS
        ex = excised_integral(F, integrand, sings, eps, lines=cfg.lines, seed=seed,
                              workers=self.workers)
        self.report.tables.append(Table(f"excision {label}", ("epsilon", "mean", "stderr"),
                                        ex.rows()))
        self.report.diagnostics[f"fit {label}"] = {
            "powers": list(ex.fit.powers), "coefficients": list(ex.fit.coefficients),
            "max_residual": ex.fit.residual, "chi2": ex.fit.chi2,
            "refinements": ex.refinements}
        return ex.estimate, ex

    def finish(self) -> Report:
        d = self.report.diagnostics
        d["lines_per_integral"] = self.cfg.lines
        d["resampled_lines"] = self.resampled
        d["resample_rate"] = self.resampled / self.lines_total if self.lines_total else 0.0
        return self.report


def _records(ctx: _Context):
    cfg = ctx.cfg
    return inv.singularity_records(cfg.polynomial, cfg.singular_points, seed=cfg.seed)


def run_gauss_bonnet(ctx: _Context):
    cfg = ctx.cfg
    n = cfg.dim
    exact = inv.gauss_bonnet_prediction(cfg.polynomial, cfg.singular_points, seed=cfg.seed)
    est, _ = ctx.integral(gauss_bonnet_integrand(n), "c^n")
    ctx.add("gauss_bonnet", est, exact, singular=bool(cfg.singular_points))
    ctx.report.diagnostics["euler_characteristic"] = inv.euler_characteristic(
        cfg.polynomial, cfg.singular_points, seed=cfg.seed)


def run_chern_numbers(ctx: _Context):
    cfg = ctx.cfg
    n, N, d = cfg.dim, cfg.ambient_dim, cfg.polynomial.degree
    sing = bool(cfg.singular_points)
    for k, part in enumerate(partitions(n)):
        name = "^".join(f"c{i}" for i in part)
        est, _ = ctx.integral(ChernIntegrand(part), name, seed_offset=k)
        if not sing:
            exact = inv.chern_numbers_smooth(N, d, part)
        elif part == (n,):
            exact = inv.gauss_bonnet_prediction(cfg.polynomial, cfg.singular_points, seed=cfg.seed)
        else:
            exact = None
        ctx.add(name, est, exact, singular=sing)


def combinatorial_cm(cfg: ScenarioConfig):
    betas = [inv.beta_combinatorial(cfg.polynomial, cfg.singular_points, r, seed=cfg.seed)
             for r in range(cfg.dim + 1)]
    return betas, cm_from_betas(betas)


def run_degree_profile(ctx: _Context):
    cfg = ctx.cfg
    n = cfg.dim
    betas, cm = combinatorial_cm(cfg)
    sing = bool(cfg.singular_points)
    for i in range(n + 1):
        integrand = mather_degree_integrand(n, i)
        if i == n:
            est = crofton_integrate(cfg.polynomial, integrand, lines=cfg.lines,
                                    seed=cfg.seed + i, workers=ctx.workers)
        else:
            est, _ = ctx.integral(integrand, f"deg c{i}^M", seed_offset=i)
        ctx.add(f"deg c{i}^M", est, cm.coeffs[i], singular=sing and i < n)
    ctx.report.diagnostics["betas_combinatorial"] = betas
    ctx.report.diagnostics["cm_combinatorial"] = str(cm)


def run_sections_involution(ctx: _Context):
    cfg = ctx.cfg
    n = cfg.dim
    betas, cm = combinatorial_cm(cfg)
    pf = pf_from_betas(betas)
    sing = bool(cfg.singular_points)
    rng = np.random.default_rng([cfg.seed, 4242])
    means, errs = [], []
    for r in range(n + 1):
        if r == 0:
            est, _ = ctx.integral(gauss_bonnet_integrand(n), "beta_0")
            m, s = est.mean, est.stderr
            ctx.add("beta_0", est, betas[0], singular=sing)
        elif r < n:
            S = linear_section(cfg.polynomial, r, rng, cfg.singular_points)
            est = crofton_integrate(S, gauss_bonnet_integrand(n - r), lines=cfg.lines,
                                    seed=cfg.seed + r, workers=ctx.workers)
            m, s = est.mean, est.stderr
            ctx.add(f"beta_{r}", est, betas[r])
        else:
            S = linear_section(cfg.polynomial, r, rng, cfg.singular_points)
            m, s = float(binary_roots(S)), 0.0
            ctx.add(f"beta_{r}", mean=m, stderr=0.0, exact=betas[r])
        means.append(m)
        errs.append(s)
    cm_num, cm_err = numeric_cm_from_betas(means, errs)
    for i in range(n + 1):
        ctx.add(f"cm_{i} (numeric betas)", mean=cm_num[i], stderr=cm_err[i], exact=cm.coeffs[i],
                singular=sing)
    ctx.report.diagnostics.update({
        "pf_combinatorial": str(pf), "cm_combinatorial": str(cm),
        "involution_roundtrip_exact": involution_I(cm_from_pf(pf)) == pf,
        "beta_source": "crofton integrals on random linear sections",
    })


def run_tube_scan(ctx: _Context):
    cfg = ctx.cfg
    fam, tube = cfg.family, cfg.tube
    n, N, d = cfg.dim, cfg.ambient_dim, cfg.polynomial.degree
    side = tube.get("side", "inside")
    shape = tube.get("shape", "fs_ball")
    chart = tube.get("chart")
    if shape == "polydisk" and chart is None:
        chart = chart_for(cfg.singular_points)
    eps = [float(e) for e in tube["epsilons"]]
    fit_eps = tube.get("fit_epsilons")
    integrand = gauss_bonnet_integrand(n)
    scan = family_tube_scan(cfg.polynomial, fam["deformation"], cfg.singular_points,
                            fam["deltas"], eps, integrand, side, shape, chart, cfg.lines,
                            cfg.seed, ctx.workers,
                            delta_ratio=float(cfg.options.get("delta_ratio", 1e-2)),
                            fit_epsilons=fit_eps)
    ctx.report.tables.append(Table("scan", SCAN_COLUMNS, scan.rows()))
    for est in scan.table.values():
        ctx.resampled += est.resampled_lines
        ctx.lines_total += est.lines_used
    # finite-eps reference: the central fiber outside the tube, chi_smooth - outside inside
    centers = tuple(tuple(p) for p in cfg.singular_points)
    ref = crofton_integrate_many(cfg.polynomial, integrand,
                                 [(TubeSpec(centers, e, shape, chart), "outside") for e in eps],
                                 cfg.lines, cfg.seed + 1, ctx.workers)
    chi = inv.chi_smooth_hypersurface(N, d)
    abs_tol = float(cfg.tolerances.get("abs_tol", 0.0))
    plateaus = {}
    for i, e in enumerate(eps):
        p = scan.plateaus[e]
        r = ref[i]
        exact = chi - r.mean if side == "inside" else r.mean
        ctx.add(f"tube(eps={e:g})", p.value, exact, oracle="reference", abs_tol=abs_tol,
                reference_stderr=r.stderr)
        plateaus[f"{e:g}"] = {"found": p.found, "delta": p.delta, "members": list(p.members),
                              "max_step": p.max_step}
    ctx.report.diagnostics["plateaus"] = plateaus
    ctx.report.diagnostics["reference"] = "chi_smooth minus the central-fiber integral outside the tube"
    if scan.fit is not None:
        tp = inv.tube_prediction(cfg.polynomial, cfg.singular_points, seed=cfg.seed)
        exact = tp if side == "inside" else chi - tp
        ctx.add("tube(eps->0)", scan.fit.intercept, exact,
                abs_tol=float(cfg.tolerances.get("fit_abs_tol", 0.1)))
        ctx.report.diagnostics["fit"] = {
            "powers": list(scan.fit.powers), "epsilons": list(scan.fit.epsilons),
            "delta": scan.fit.delta, "coefficients": list(scan.fit.coefficients),
            "max_residual": scan.fit.residual}


def run_milnor_suite(ctx: _Context):
    cfg = ctx.cfg
    rnd = random.Random(cfg.seed)
    draws = int(cfg.options.get("coordinate_changes", 10))
    recs = _records(ctx)
    rows = []
    for k, rec in enumerate(recs):
        tag = "[" + ":".join(str(x) for x in rec.point) + "]"
        germ = inv.GermRecord.from_projective(cfg.polynomial, rec.point)
        w = cfg.weights[k] if k < len(cfg.weights) else None
        qh = inv.milnor_quasi_homogeneous(w, germ.f) if w else None
        ctx.add(f"mu{tag}", mean=rec.mu, exact=qh)
        _invariance(ctx, germ.f, rec.mu, f"mu invariance{tag}", rnd, draws)
        if rec.dim == 1:
            ctx.add(f"eu{tag} = m", mean=rec.eu, exact=rec.m)
            ctx.add(f"telescoping{tag}", mean=inv.telescoping_prediction(rec),
                    exact=rec.sigma - rec.eu)
        rows.append([":".join(str(x) for x in rec.point), rec.mu, rec.mu_section, rec.m, rec.eu,
                     rec.sigma])
    ctx.report.tables.append(Table("singularities", ("point", "mu", "mu_section", "m", "eu", "sigma"),
                                   rows))
    for g in cfg.germs:
        f = g["polynomial"]
        mu = inv.milnor_number(f)
        qh = inv.milnor_quasi_homogeneous(g["weights"], f) if g["weights"] else None
        ctx.add(f"mu({g['text']})", mean=mu, exact=qh)
        _invariance(ctx, f, mu, f"mu invariance({g['text']})", rnd, draws)
    if cfg.singular_points:
        F, S = cfg.polynomial, cfg.singular_points
        ctx.report.diagnostics["predictions"] = {
            "chi_smooth": inv.chi_smooth_hypersurface(cfg.ambient_dim, F.degree),
            "euler_characteristic": inv.euler_characteristic(F, S, seed=cfg.seed),
            "gauss_bonnet": inv.gauss_bonnet_prediction(F, S, seed=cfg.seed),
            "tube": inv.tube_prediction(F, S, seed=cfg.seed),
        }


def _invariance(ctx, f, mu, name, rnd, draws):
    same = 0
    for _ in range(draws):
        A = AffineMap.random_exact(f.num_vars, rnd)
        same += inv.milnor_number(linear_substitute(f, A)) == mu
    ctx.add(name, mean=same, exact=draws)


def run_embedding_invariance(ctx: _Context):
    cfg = ctx.cfg
    n = cfg.dim
    maps = int(cfg.options.get("maps", 3))
    rnd = random.Random(cfg.seed + 99)
    integrand = gauss_bonnet_integrand(n)
    base, _ = ctx.integral(integrand, "F")
    exact = inv.gauss_bonnet_prediction(cfg.polynomial, cfg.singular_points, seed=cfg.seed)
    ctx.add("gauss_bonnet(F)", base, exact, singular=bool(cfg.singular_points))
    max_cond = float(cfg.options.get("max_condition", MAX_EMBEDDING_CONDITION))
    for k in range(1, maps + 1):
        A = _conditioned_map(cfg.ambient_dim + 1, rnd, max_cond)
        FA = linear_substitute(cfg.polynomial, A)
        Ainv = A.inverse()
        SA = [tuple(Ainv.apply(list(p))) for p in cfg.singular_points]
        est, _ = ctx.integral(integrand, f"F o A{k}", seed_offset=1000 * k, F=FA, sings=SA)
        ctx.add(f"gauss_bonnet(F o A{k}) - gauss_bonnet(F)", mean=est.mean - base.mean,
                stderr=float(np.hypot(est.stderr, base.stderr)), exact=0.0, abs_tol=0.0)
        ctx.resampled += est.resampled_lines
        ctx.lines_total += est.lines_used
        ctx.report.diagnostics[f"A{k}"] = {"matrix": [[str(x) for x in row] for row in A.matrix],
                                           "condition_number": A.condition_number}


def _conditioned_map(n: int, rnd: random.Random, max_cond: float) -> AffineMap:
    # badly conditioned maps squeeze curvature into regions far below the excision radii
    while True:
        A = AffineMap.random_exact(n, rnd)
        if A.condition_number <= max_cond:
            return A


RUNNERS = {
    "gauss_bonnet": run_gauss_bonnet,
    "chern_numbers": run_chern_numbers,
    "degree_profile": run_degree_profile,
    "sections_involution": run_sections_involution,
    "tube_scan": run_tube_scan,
    "milnor_suite": run_milnor_suite,
    "embedding_invariance": run_embedding_invariance,
}


def run_scenario(cfg: ScenarioConfig, workers: int = 1) -> Report:
    """Run the scenario's experiment.  Failures keep the partial report and set ``error``."""
    ctx = _Context(cfg, workers)
    t0 = time.perf_counter()
    try:
        RUNNERS[cfg.experiment](ctx)
    except Exception as exc:  # experiment-level failure: keep partial results
        log.exception("experiment %s failed", cfg.experiment)
        ctx.report.error = f"{type(exc).__name__}: {exc}"
    report = ctx.finish()
    report.runtime = time.perf_counter() - t0
    return report
