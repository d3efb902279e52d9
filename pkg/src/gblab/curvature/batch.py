"""Vectorized curvature on point batches via a unitary adapted frame.

At a unit representative ``p`` of a smooth point, the frame ``U = [p, e_1..e_n, nu]``
with ``nu = conj(grad F)/|grad F|`` is unitary, the ``e_i`` span the tangent space,
and in the affine chart of ``U`` the hypersurface is a graph with no linear term.
The metric there is the identity, its first derivatives vanish, and the curvature is

    R^i_{j k lbar} = delta_ij delta_kl + delta_jl delta_ki - b_jk conj(b_il),
    b = -e^T Hess F(p) e / |grad F(p)|.

Only the 2-jet of the hypersurface enters, so gradient and Hessian suffice.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from ..algebra import CompiledPolynomial, Polynomial
from .exterior import MAX_DIM, ExteriorForm
from .forms import CurvatureMatrix, all_chern_forms, density, kahler_form


class Hypersurface:
    """A projective hypersurface ``{F = 0}`` in ``P^N`` prepared for batch evaluation."""

    def __init__(self, F: Polynomial):
        if F.is_zero or not F.is_homogeneous:
            raise ValueError("hypersurface needs a nonzero homogeneous polynomial")
        if F.degree < 1:
            raise ValueError("hypersurface needs positive degree")
        self.polynomial = F
        self.N = F.num_vars - 1
        self.n = self.N - 1
        self.degree = F.degree
        self.compiled = CompiledPolynomial(F, derivatives=2)
        self.coefficient_scale = max(abs(complex(c)) for c in F.terms.values())

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return self.compiled(X)

    def gradient_norm(self, X: np.ndarray) -> np.ndarray:
        p = X / np.linalg.norm(X, axis=-1, keepdims=True)
        _, g = self.compiled.value_grad(p)
        return np.linalg.norm(g, axis=-1)


@dataclass
class FrameCurvature:
    """Curvature at a batch of points in orthonormal tangent frames (so ``g = I``)."""

    R: np.ndarray               # (M, n, n, n, n)
    second_fundamental: np.ndarray  # (M, n, n)
    gradient_norm: np.ndarray   # (M,)


def frame_curvature(surface: Hypersurface, points: np.ndarray) -> FrameCurvature:
    X = np.asarray(points, dtype=complex)
    p = X / np.linalg.norm(X, axis=-1, keepdims=True)
    _, G, H = surface.compiled.value_grad_hess(p)
    gn = np.linalg.norm(G, axis=-1)
    nu = np.conj(G) / gn[..., None]
    A = np.stack([p, nu], axis=-1)
    Q, _ = np.linalg.qr(A, mode="complete")
    E = Q[..., :, 2:]
    b = -np.einsum("...ai,...ab,...bk->...ik", E, H, E) / gn[..., None, None]
    n = surface.n
    eye = np.eye(n)
    flat = np.einsum("ji,kl->ijkl", eye, eye) + np.einsum("jl,ki->ijkl", eye, eye)
    R = flat - np.einsum("...jk,...il->...ijkl", b, np.conj(b))
    return FrameCurvature(R=R, second_fundamental=b, gradient_norm=gn)


class ChernIntegrand:
    """Pointwise density ratio of ``c^{i_1} ^ ... ^ c^{i_r} ^ omega^k`` to the volume form.

    ``chern`` lists the Chern degrees, ``omega`` the power of the Kahler form; the total
    must equal the dimension.  ``ChernIntegrand((n,))`` is the Gauss-Bonnet integrand
    ``(2 pi)^{-n} Pf``.
    """

    def __init__(self, chern: tuple[int, ...] = (), omega: int = 0):
        self.chern = tuple(int(c) for c in chern if c)
        self.omega = int(omega)
        self.dimension = sum(self.chern) + self.omega

    @property
    def name(self) -> str:
        parts = [f"c{c}" for c in self.chern] + (["w"] * self.omega)
        return "^".join(parts) or "1"

    def check(self, surface: Hypersurface):
        if self.dimension != surface.n:
            raise ValueError(f"integrand {self.name} has degree {2 * self.dimension}, "
                             f"surface has real dimension {2 * surface.n}")
        if not 1 <= surface.n <= MAX_DIM:
            raise ValueError(f"dimension {surface.n} outside 1..{MAX_DIM}")

    def __call__(self, surface: Hypersurface, points: np.ndarray) -> np.ndarray:
        self.check(surface)
        n = surface.n
        M = len(points)
        if M == 0:
            return np.zeros(0)
        fc = frame_curvature(surface, points)
        forms = []
        if self.chern:
            cs = all_chern_forms(CurvatureMatrix.from_tensor(fc.R))
            forms += [cs[c] for c in self.chern]
        if self.omega:
            w = kahler_form(np.broadcast_to(np.eye(n), (M, n, n)))
            forms += [w] * self.omega
        if not forms:
            return np.full(M, factorial(n) / np.pi ** n)
        return density(forms)

    def __repr__(self):
        return f"ChernIntegrand({self.name})"


class UnitIntegrand:
    """``h = 1``: integrates the Riemannian volume."""

    name = "volume"
    dimension = None

    def check(self, surface: Hypersurface):
        pass

    def __call__(self, surface: Hypersurface, points: np.ndarray) -> np.ndarray:
        return np.ones(len(points))

    def __repr__(self):
        return "UnitIntegrand()"


def gauss_bonnet_integrand(n: int) -> ChernIntegrand:
    return ChernIntegrand((n,), 0)


def mather_degree_integrand(n: int, i: int) -> ChernIntegrand:
    """Integrand ``c^{n-i} ^ omega^i`` whose integral is ``deg c_i^M``."""
    if not 0 <= i <= n:
        raise ValueError("degree index out of range")
    return ChernIntegrand((n - i,) if n - i else (), i)


def jet_density_ratio(F: Polynomial, point, integrand: ChernIntegrand) -> float:
    """Same pointwise ratio as ``integrand`` but through the jet path (reference route)."""
    from .forms import chern_curvature, kahler_form as kform
    from .metric import pullback_metric

    m = pullback_metric(F, point)
    theta = chern_curvature(m)
    cs = all_chern_forms(theta)
    forms: list[ExteriorForm] = [cs[c] for c in integrand.chern] + [kform(m)] * integrand.omega
    if not forms:
        return factorial(m.n) / np.pi ** m.n
    return float(density(forms)) / m.vol_density
