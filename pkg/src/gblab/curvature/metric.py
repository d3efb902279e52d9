"""Induced Fubini-Study metric on a hypersurface, read off the jet of the Kahler potential."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..algebra import DEFAULT_ORDER, Jet, Polynomial, dehomogenize, implicit_graph_jet
from .exterior import MAX_DIM

SMOOTHNESS_THRESHOLD = 1e-8
KAHLER_TOL = 1e-9


class SmoothnessError(ValueError):
    """The point is (numerically) on the singular locus."""


@dataclass(frozen=True)
class MetricJet:
    """Metric data at a point of a chart.

    ``g[i, j]`` is ``g_{i jbar}``, ``dg[k, i, j]`` is ``d_k g_{i jbar}`` and
    ``ddg[k, l, i, j]`` is ``d_k dbar_l g_{i jbar}``; all at the base point of the
    graph chart whose free coordinates are the affine coordinates ``free``.
    """

    n: int
    g: np.ndarray
    dg: np.ndarray
    ddg: np.ndarray
    vol_density: float
    min_eigenvalue: float
    base_point: np.ndarray
    chart: int
    solved: int
    free: tuple[int, ...]

    def kahler_defect(self) -> float:
        """Relative violation of ``d_k g_{i jbar} = d_i g_{k jbar}``."""
        scale = max(float(np.max(np.abs(self.dg), initial=0.0)), float(np.max(np.abs(self.g))))
        return float(np.max(np.abs(self.dg - self.dg.transpose(1, 0, 2)), initial=0.0)) / scale


def metric_from_potential(K: Jet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(g, dg, ddg)`` at the expansion point of a potential jet (order >= 4)."""
    n = K.num_vars
    e = np.eye(n, dtype=int)
    g = np.empty((n, n), dtype=complex)
    dg = np.empty((n, n, n), dtype=complex)
    ddg = np.empty((n, n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            g[i, j] = K.derivative(e[i], e[j])
            for k in range(n):
                dg[k, i, j] = K.derivative(e[i] + e[k], e[j])
                for l in range(n):
                    ddg[k, l, i, j] = K.derivative(e[i] + e[k], e[j] + e[l])
    return g, dg, ddg


def _affine(point: Sequence, chart: int) -> np.ndarray:
    x = np.asarray([complex(c) for c in point])
    return np.delete(x / x[chart], chart)


def pullback_metric(F: Polynomial, point: Sequence, chart: int | None = None,
                    solved: int | None = None, order: int = DEFAULT_ORDER) -> MetricJet:
    """Metric induced on ``{F = 0}`` at ``point`` (homogeneous coordinates).

    The potential is ``log(1 + sum |w_a|^2)`` in the affine chart ``x_chart = 1``,
    composed with the implicit graph over the free affine coordinates.  With this
    normalization no scalar prefactor appears and the line ``x2 = 0`` has volume
    ``pi``.
    """
    if not F.is_homogeneous:
        raise ValueError("F must be homogeneous")
    x = np.asarray([complex(c) for c in point])
    if len(x) != F.num_vars:
        raise ValueError("point arity does not match F")
    N = F.num_vars - 1
    n = N - 1
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"hypersurface dimension {n} outside 1..{MAX_DIM}")
    if chart is None:
        chart = int(np.argmax(np.abs(x)))
    w = _affine(x, chart)
    f = dehomogenize(F, chart).to_complex()
    grad = np.array([f.diff(a).evaluate(w) for a in range(N)])
    coeff_scale = max(abs(complex(c)) for c in f.terms.values())
    if np.linalg.norm(grad) < SMOOTHNESS_THRESHOLD * coeff_scale:
        raise SmoothnessError("gradient vanishes: point is on the singular locus")
    if solved is None:
        solved = int(np.argmax(np.abs(grad)))
    phi = implicit_graph_jet(f, w, solved, order)
    free = tuple(a for a in range(N) if a != solved)
    coords = []
    for a in range(N):
        if a == solved:
            coords.append(phi)
        else:
            coords.append(Jet.variable(free.index(a), n, order, value=w[a]))
    S = Jet.constant(1.0, n, order)
    for c in coords:
        S = S + c * c.conjugate()
    K = S.log()
    g, dg, ddg = metric_from_potential(K)
    herm = np.max(np.abs(g - g.conj().T)) / np.max(np.abs(g))
    if herm > 1e-9:
        raise ArithmeticError(f"metric not Hermitian (defect {herm:.2e})")
    g = 0.5 * (g + g.conj().T)
    eig = np.linalg.eigvalsh(g)
    if eig[0] <= 0:
        raise ArithmeticError("induced metric is not positive definite")
    w_ref = w.copy()
    w_ref[solved] = phi.constant_term
    base = np.insert(w_ref, chart, 1.0)
    m = MetricJet(n=n, g=g, dg=dg, ddg=ddg, vol_density=float(np.linalg.det(g).real),
                  min_eigenvalue=float(eig[0]), base_point=base, chart=chart, solved=solved,
                  free=free)
    if m.kahler_defect() > KAHLER_TOL:
        raise ArithmeticError(f"Kahler symmetry violated ({m.kahler_defect():.2e})")
    return m
