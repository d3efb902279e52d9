"""Scenario files: JSON with exact coordinates written as rational strings."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..algebra import ParseError, Polynomial, QQi, parse_constant, parse_polynomial

EXPERIMENTS = {
    "gauss_bonnet": "Gauss-Bonnet integral of the top Chern form vs chi(X) + sum Eu",
    "chern_numbers": "integrals of products of Chern forms vs Chern numbers",
    "degree_profile": "integrals of c^(n-i) ^ omega^i vs Mather-Chern degrees",
    "sections_involution": "section integrals beta_r, Pfaffian polynomial and the involution",
    "tube_scan": "curvature inside/outside tubes along a smoothing family, delta and eps limits",
    "milnor_suite": "Milnor numbers, multiplicities, Euler obstructions, specialization",
    "embedding_invariance": "Gauss-Bonnet estimate under random exact linear coordinate changes",
}
DEFAULT_EPSILONS = (0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.3)


class ValidationError(ValueError):
    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{p}: {m}" for p, m in problems))


@dataclass
class ScenarioConfig:
    raw: dict
    name: str
    ambient_dim: int
    polynomial: Polynomial
    singular_points: list
    weights: list
    experiment: str
    lines: int
    seed: int
    family: dict | None = None
    tube: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    germs: list = field(default_factory=list)
    options: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.ambient_dim - 1

    @property
    def sigma_level(self) -> float:
        return float(self.tolerances.get("sigma_level", 3.0))

    def canonical(self) -> dict:
        """Scenario echo with effective sampling settings (worker count excluded)."""
        out = json.loads(json.dumps(self.raw))
        out.setdefault("sampling", {})
        out["sampling"]["lines"] = self.lines
        out["sampling"]["seed"] = self.seed
        out["sampling"].pop("workers", None)
        return out

    def content_hash(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _exact(text, path: str, problems: list) -> QQi | None:
    try:
        return parse_constant(str(text))
    except (ParseError, ValueError, ZeroDivisionError) as exc:
        problems.append((path, f"not an exact number: {exc}"))
        return None


def _positive_list(value, path: str, problems: list) -> list[float]:
    if not isinstance(value, list) or not value:
        problems.append((path, "expected a non-empty list of positive numbers"))
        return []
    out = []
    for i, v in enumerate(value):
        try:
            x = float(Fraction(str(v)))
        except (ValueError, ZeroDivisionError):
            problems.append((f"{path}[{i}]", "not a number"))
            continue
        if x <= 0:
            problems.append((f"{path}[{i}]", "must be positive"))
        out.append(x)
    return out


def default_lines(dim: int) -> int:
    return 1_000_000 if dim <= 1 else 2_000_000


def parse_scenario(data: dict, lines: int | None = None, seed: int | None = None
                   ) -> ScenarioConfig:
    """Validate a decoded scenario; every problem is reported with its field path."""
    problems: list[tuple[str, str]] = []
    if not isinstance(data, dict):
        raise ValidationError([("$", "scenario must be a JSON object")])
    variety = data.get("variety")
    if not isinstance(variety, dict):
        raise ValidationError([("variety", "missing or not an object")])
    N = variety.get("ambient_dim")
    if not isinstance(N, int) or not 2 <= N <= 4:
        problems.append(("variety.ambient_dim", "must be an integer between 2 and 4"))
        raise ValidationError(problems)
    F = None
    try:
        F = parse_polynomial(str(variety.get("polynomial", "")), N + 1)
    except ParseError as exc:
        problems.append(("variety.polynomial", str(exc)))
    if F is not None:
        if F.is_zero:
            problems.append(("variety.polynomial", "zero polynomial"))
        elif not F.is_homogeneous:
            problems.append(("variety.polynomial", "must be homogeneous"))
    points = []
    for i, p in enumerate(variety.get("singular_points", []) or []):
        path = f"variety.singular_points[{i}]"
        if not isinstance(p, list) or len(p) != N + 1:
            problems.append((path, f"expected {N + 1} coordinates"))
            continue
        pt = [_exact(x, f"{path}[{j}]", problems) for j, x in enumerate(p)]
        if any(x is None for x in pt):
            continue
        if not any(pt):
            problems.append((path, "zero vector is not a projective point"))
            continue
        if F is not None and F.is_homogeneous and not F.is_zero:
            if F.evaluate(pt) != 0:
                problems.append((path, "point is not on the hypersurface"))
            elif any(g.evaluate(pt) != 0 for g in F.gradient()):
                problems.append((path, "gradient does not vanish: point is not singular"))
        points.append(tuple(pt))
    weights = variety.get("weights") or []
    if weights and len(weights) != len(points):
        problems.append(("variety.weights", "need one weight list per singular point"))
    parsed_w = []
    for i, w in enumerate(weights):
        if w is None:
            parsed_w.append(None)
            continue
        if not isinstance(w, list) or len(w) != N:
            problems.append((f"variety.weights[{i}]", f"expected {N} weights"))
            parsed_w.append(None)
            continue
        parsed_w.append([Fraction(str(x)) for x in w])
    exp = data.get("experiment")
    if exp not in EXPERIMENTS:
        problems.append(("experiment", f"must be one of {sorted(EXPERIMENTS)}"))
    sampling = data.get("sampling") or {}
    n_lines = lines if lines is not None else sampling.get("lines", default_lines(N - 1))
    n_seed = seed if seed is not None else sampling.get("seed", 0)
    if not isinstance(n_lines, int) or n_lines < 2:
        problems.append(("sampling.lines", "must be an integer >= 2"))
    if not isinstance(n_seed, int) or n_seed < 0:
        problems.append(("sampling.seed", "must be a non-negative integer"))
    family = None
    if exp == "tube_scan" or "family" in data:
        fam = data.get("family")
        if not isinstance(fam, dict):
            problems.append(("family", "tube_scan needs a family object"))
        else:
            G = None
            try:
                G = parse_polynomial(str(fam.get("deformation", "")), N + 1)
            except ParseError as exc:
                problems.append(("family.deformation", str(exc)))
            if G is not None and F is not None and (not G.is_homogeneous or G.degree != F.degree):
                problems.append(("family.deformation", "must be homogeneous of the same degree"))
            deltas = _positive_list(fam.get("deltas"), "family.deltas", problems)
            family = {"deformation": G, "deltas": deltas}
        if exp == "tube_scan" and not points:
            problems.append(("variety.singular_points", "tube_scan needs the singular points"))
    tube = dict(data.get("tube") or {})
    if tube:
        if tube.get("shape", "fs_ball") not in ("fs_ball", "polydisk"):
            problems.append(("tube.shape", "must be fs_ball or polydisk"))
        if tube.get("side", "inside") not in ("inside", "outside"):
            problems.append(("tube.side", "must be inside or outside"))
        if "epsilons" in tube:
            tube["epsilons"] = _positive_list(tube["epsilons"], "tube.epsilons", problems)
        if "fit_epsilons" in tube:
            tube["fit_epsilons"] = _positive_list(tube["fit_epsilons"], "tube.fit_epsilons",
                                                  problems)
        ch = tube.get("chart")
        if ch is not None and (not isinstance(ch, int) or not 0 <= ch <= N):
            problems.append(("tube.chart", f"must be an index in 0..{N}"))
    if exp == "tube_scan" and "epsilons" not in tube:
        problems.append(("tube.epsilons", "tube_scan needs an epsilon grid"))
    tol = data.get("tolerances") or {}
    for key in ("sigma_level", "abs_tol", "rel_tol"):
        if key in tol and (not isinstance(tol[key], (int, float)) or tol[key] < 0):
            problems.append((f"tolerances.{key}", "must be a non-negative number"))
    germs = []
    for i, gdef in enumerate(data.get("germs") or []):
        path = f"germs[{i}]"
        try:
            nv = int(gdef["num_vars"])
            g = parse_polynomial(str(gdef["polynomial"]), nv)
            w = [Fraction(str(x)) for x in gdef["weights"]] if gdef.get("weights") else None
            germs.append({"polynomial": g, "weights": w, "text": str(gdef["polynomial"])})
        except (KeyError, TypeError, ValueError) as exc:
            problems.append((path, f"invalid germ: {exc}"))
    if problems:
        raise ValidationError(problems)
    return ScenarioConfig(raw=data, name=str(data.get("name", "")), ambient_dim=N, polynomial=F,
                          singular_points=points, weights=parsed_w, experiment=exp,
                          lines=n_lines, seed=n_seed, family=family, tube=tube,
                          tolerances=dict(tol), germs=germs, options=dict(data.get("options") or {}))


def load_scenario(path: str | Path, lines: int | None = None, seed: int | None = None
                  ) -> ScenarioConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError([("$", f"invalid JSON: {exc}")]) from exc
    return parse_scenario(data, lines=lines, seed=seed)
