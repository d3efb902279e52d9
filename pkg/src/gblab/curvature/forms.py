"""Chern curvature, Chern forms, the Kahler form and top-degree densities.

Everything here accepts leading batch axes, so the same functions serve the
single-point jet path and the vectorized sampler path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .exterior import (ExteriorForm, conjugate_array, determinant, one_array, pair_mask,
                       pfaffian, tables)
from .metric import MetricJet

TWO_PI = 2.0 * np.pi
REAL_TOL = 1e-9


class DegreeError(ValueError):
    """Wedge product does not have top degree."""


@dataclass(frozen=True)
class CurvatureMatrix:
    """Curvature ``Theta^i_j = sum_{k,l} R[..., i, j, k, l] dz_k ^ dzbar_l``.

    ``forms`` holds the same data as an array ``(..., n, n, 4**n)`` of 2-forms.
    """

    n: int
    R: np.ndarray
    forms: np.ndarray

    @classmethod
    def from_tensor(cls, R: np.ndarray) -> "CurvatureMatrix":
        n = R.shape[-1]
        forms = np.zeros(R.shape[:-2] + (4 ** n,), dtype=complex)
        for k in range(n):
            for l in range(n):
                forms[..., pair_mask(n, k, l)] = R[..., k, l]
        return cls(n=n, R=R, forms=forms)

    def entry(self, i: int, j: int) -> ExteriorForm:
        return ExteriorForm(self.n, self.forms[..., i, j, :])

    def type_11_defect(self) -> float:
        t = tables(self.n)
        mask = np.ones(t.size, dtype=bool)
        for k in range(self.n):
            for l in range(self.n):
                mask[pair_mask(self.n, k, l)] = False
        return float(np.max(np.abs(self.forms[..., mask]), initial=0.0))


def inverse_metric(g: np.ndarray) -> np.ndarray:
    """``ginv[..., i, m] = g^{i mbar}`` with ``sum_m g^{i mbar} g_{j mbar} = delta_ij``."""
    return np.swapaxes(np.linalg.inv(g), -1, -2)


def chern_curvature(m: MetricJet) -> CurvatureMatrix:
    """Chern curvature ``dbar(g^{-1} d g)`` of the metric in the chart frame."""
    gi = inverse_metric(m.g)
    # dbar_l g_{p qbar} = conj(d_l g_{q pbar})
    dbar = np.conj(m.dg).transpose(0, 2, 1)
    R = (-np.einsum("im,kljm->ijkl", gi, m.ddg)
         + np.einsum("iq,lpq,pm,kjm->ijkl", gi, dbar, gi, m.dg))
    return CurvatureMatrix.from_tensor(R)


def lowered_curvature(R: np.ndarray, g: np.ndarray) -> np.ndarray:
    """``R_{i jbar k lbar} = sum_m g_{m jbar} R^m_{i k lbar}``."""
    return np.einsum("...mj,...mikl->...ijkl", g, R)


def total_chern_array(theta: CurvatureMatrix) -> np.ndarray:
    n = theta.n
    mat = (1j / TWO_PI) * theta.forms
    eye = one_array(n)
    for i in range(n):
        mat[..., i, i, :] = mat[..., i, i, :] + eye
    return determinant(mat, n)


def chern_form(theta: CurvatureMatrix, r: int) -> ExteriorForm:
    """Degree-``2r`` component of ``det(I + (i/2pi) Theta)``."""
    if r < 0:
        raise ValueError("Chern form degree must be non-negative")
    n = theta.n
    batch = theta.forms.shape[:-3]
    if r > n:
        return ExteriorForm.zero(n, batch)
    return ExteriorForm(n, total_chern_array(theta)).grade(2 * r)


def all_chern_forms(theta: CurvatureMatrix) -> list[ExteriorForm]:
    total = ExteriorForm(theta.n, total_chern_array(theta))
    return [total.grade(2 * r) for r in range(theta.n + 1)]


def kahler_form(m_or_g) -> ExteriorForm:
    """``omega = (1/pi)(i/2) sum g_{i jbar} dz_i ^ dzbar_j``; a projective line has area 1."""
    g = m_or_g.g if isinstance(m_or_g, MetricJet) else np.asarray(m_or_g)
    n = g.shape[-1]
    coeffs = np.zeros(g.shape[:-2] + (4 ** n,), dtype=complex)
    for i in range(n):
        for j in range(n):
            coeffs[..., pair_mask(n, i, j)] = (0.5j / np.pi) * g[..., i, j]
    return ExteriorForm(n, coeffs)


def wedge_all(forms: Sequence[ExteriorForm]) -> ExteriorForm:
    if not forms:
        raise DegreeError("nothing to wedge")
    return reduce(lambda a, b: a.wedge(b), forms)


def density(forms: Sequence[ExteriorForm], tol: float = REAL_TOL) -> np.ndarray:
    """Lebesgue density of the wedge of ``forms`` (must have total degree ``2n``)."""
    n = forms[0].n
    total_deg = 0
    scale = 1.0
    for f in forms:
        degs = f.degrees
        if len(degs) > 1:
            raise DegreeError(f"inhomogeneous form with degrees {sorted(degs)}")
        total_deg += degs.pop() if degs else 0
        scale *= max(float(np.max(np.abs(f.coeffs))), 1e-300)
    if total_deg != 2 * n and total_deg != 0:
        raise DegreeError(f"total degree {total_deg} differs from top degree {2 * n}")
    z = wedge_all(forms).lebesgue_complex()
    bad = np.abs(z.imag) > tol * np.maximum(np.abs(z), scale)
    if np.any(bad):
        raise ArithmeticError(f"density has imaginary part {np.max(np.abs(z.imag)):.3e}")
    return z.real


def unitary_frame(g: np.ndarray) -> np.ndarray:
    """Frame matrix ``C`` (columns = orthonormal vectors in chart coordinates): ``C^T g conj(C) = I``."""
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("metric is not positive definite; no unitary frame") from exc
    return np.swapaxes(np.linalg.inv(L), -1, -2)


def pfaffian_crosscheck(theta: CurvatureMatrix, m: MetricJet | np.ndarray) -> np.ndarray:
    """Lebesgue density of ``Pf(Theta_R / 2pi)`` computed through a real unitary frame.

    ``Theta`` is moved to a unitary frame, split as ``A + iB`` with real-form
    matrices ``A`` (antisymmetric) and ``B`` (symmetric), realified to
    ``[[A, -B], [B, A]]`` and the Pfaffian is taken in the complex orientation
    ``(x_1, y_1, ..., x_n, y_n)``.
    """
    g = m.g if isinstance(m, MetricJet) else np.asarray(m)
    n = theta.n
    C = unitary_frame(g)
    Cinv = np.linalg.inv(C)
    th = np.einsum("...ai,...ijs,...jb->...abs", Cinv, theta.forms, C)
    th_bar = conjugate_array(th, n)
    skew = np.abs(np.swapaxes(th_bar, -2, -3) + th)
    if np.max(skew) > 1e-8 * max(float(np.max(np.abs(th))), 1e-300):
        raise ArithmeticError("curvature is not skew-Hermitian in the unitary frame")
    A = 0.5 * (th + th_bar)
    B = -0.5j * (th - th_bar)
    top = np.concatenate([A, -B], axis=-2)
    bottom = np.concatenate([B, A], axis=-2)
    M = np.concatenate([top, bottom], axis=-3)
    order = [g_ for k in range(n) for g_ in (k, n + k)]
    M = M[..., order, :, :][..., :, order, :]
    pf = ExteriorForm(n, pfaffian(M, n) / TWO_PI ** n)
    return density([pf])
