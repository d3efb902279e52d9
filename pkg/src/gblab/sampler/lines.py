"""Random projective lines and their intersections with a hypersurface."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..curvature.batch import Hypersurface

SEPARATION_TOL = 1e-6
VANISHING_TOL = 1e-12


@dataclass(frozen=True)
class ProjectiveLine:
    """The line ``[s:t] -> s*a + t*b`` spanned by orthonormal ``a, b`` in ``C^{N+1}``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if abs(np.vdot(self.a, self.b)) > 1e-12 or abs(np.linalg.norm(self.a) - 1) > 1e-12 \
                or abs(np.linalg.norm(self.b) - 1) > 1e-12:
            raise ValueError("line frame must be orthonormal")

    def point(self, s, t) -> np.ndarray:
        return s * self.a + t * self.b


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_frames(rng: np.random.Generator, N: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """``count`` unitary-invariant lines in ``P^N`` as stacked orthonormal pairs ``(a, b)``."""
    a = _complex_normal(rng, (count, N + 1))
    b = _complex_normal(rng, (count, N + 1))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b -= np.sum(np.conj(a) * b, axis=1, keepdims=True) * a
    nb = np.linalg.norm(b, axis=1, keepdims=True)
    bad = nb[:, 0] < 1e-12
    if np.any(bad):  # probability zero; redraw those rows
        a2, b2 = haar_frames(rng, N, int(bad.sum()))
        a[bad], b[bad], nb[bad] = a2, b2, 1.0
    b /= nb
    return a, b


def haar_line(rng: np.random.Generator, N: int) -> ProjectiveLine:
    a, b = haar_frames(rng, N, 1)
    return ProjectiveLine(a[0], b[0])


def fs_distance(p, q) -> float:
    """Fubini-Study distance ``arccos(|<p,q>| / (|p| |q|))`` in ``[0, pi/2]``."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    np_, nq = np.linalg.norm(p, axis=-1), np.linalg.norm(q, axis=-1)
    if np.any(np_ == 0) or np.any(nq == 0):
        raise ValueError("zero vector is not a projective point")
    c = np.abs(np.sum(np.conj(p) * q, axis=-1)) / (np_ * nq)
    return np.arccos(np.clip(c, 0.0, 1.0))


def fs_sine_distance(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``sin`` of the Fubini-Study distance, accurate for nearby points (unit inputs)."""
    ip = np.sum(np.conj(p) * q, axis=-1)
    return np.linalg.norm(q - ip[..., None] * p, axis=-1)


@dataclass
class LineIntersection:
    """Intersection points (unit representatives) of a batch of lines with ``{F = 0}``.

    ``points`` has shape ``(M, d, N+1)``. ``resample`` flags ill-conditioned lines.
    """

    points: np.ndarray
    residual: np.ndarray
    separation: np.ndarray
    leading: np.ndarray
    resample: np.ndarray

    def __len__(self):
        return len(self.points)


def binary_form(surface: Hypersurface, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coefficients ``c[..., k]`` of ``t^k`` in ``F(a + t b)``, via the DFT on roots of unity."""
    d = surface.degree
    w = np.exp(2j * np.pi * np.arange(d + 1) / (d + 1))
    X = a[:, None, :] + w[None, :, None] * b[:, None, :]
    vals = surface(X)
    return np.fft.fft(vals, axis=1) / (d + 1)


def _poly_roots(c: np.ndarray) -> np.ndarray:
    """Roots of ``sum c[..., k] t^k`` (leading coefficient nonzero) via companion matrices."""
    d = c.shape[1] - 1
    if d == 1:
        return -c[:, :1] / c[:, 1:]
    comp = np.zeros((len(c), d, d), dtype=complex)
    comp[:, 0, :] = -c[:, -2::-1] / c[:, -1:]
    comp[:, np.arange(1, d), np.arange(d - 1)] = 1.0
    return np.linalg.eigvals(comp)


def _newton(c: np.ndarray, t: np.ndarray) -> np.ndarray:
    """One Newton step on each root ``t[..., j]`` of the polynomial with coefficients ``c``."""
    d = c.shape[1] - 1
    p = np.zeros_like(t)
    dp = np.zeros_like(t)
    for k in range(d, -1, -1):
        dp = dp * t + p
        p = p * t + c[:, k:k + 1]
    ok = np.abs(dp) > 0
    return np.where(ok, t - p / np.where(ok, dp, 1.0), t)


_ROTATIONS = [np.array([[1, 1], [1, -1]]) / np.sqrt(2),
              np.array([[1, 1j], [1j, 1]]) / np.sqrt(2),
              np.array([[2, 1], [-1, 2]]) / np.sqrt(5)]
REFRAME_TOL = 1e-6


def intersect_lines(surface: Hypersurface, a: np.ndarray, b: np.ndarray) -> LineIntersection:
    d = surface.degree
    a, b = a.copy(), b.copy()
    c = binary_form(surface, a, b)
    scale = np.max(np.abs(c), axis=1)
    # both endpoints (nearly) on the hypersurface: rotate the frame within the line
    for rot in _ROTATIONS:
        weak = np.maximum(np.abs(c[:, 0]), np.abs(c[:, -1])) < REFRAME_TOL * scale
        if not np.any(weak):
            break
        a[weak], b[weak] = (rot[0, 0] * a[weak] + rot[0, 1] * b[weak],
                            rot[1, 0] * a[weak] + rot[1, 1] * b[weak])
        c[weak] = binary_form(surface, a[weak], b[weak])
    lead = np.abs(c[:, -1])
    flip = lead < np.abs(c[:, 0])
    # with a small leading coefficient some root sits near [0:1]; use the reversed form
    cc = np.where(flip[:, None], c[:, ::-1], c)
    degenerate = (np.abs(cc[:, -1]) <= VANISHING_TOL * np.maximum(scale, 1e-300)) | (scale == 0)
    cc = np.where(degenerate[:, None], np.eye(d + 1)[-1], cc)
    t = _poly_roots(cc)
    # a root tau stands for first + tau*second; roots outside the unit disk are
    # polished as sigma = 1/tau on the reversed form, giving sigma*first + second
    first = np.where(flip[:, None, None], b[:, None, :], a[:, None, :])
    second = np.where(flip[:, None, None], a[:, None, :], b[:, None, :])
    big = np.abs(t) > 1
    tau = _newton(cc, np.where(big, 0.0, t))
    sigma = _newton(cc[:, ::-1], np.where(big, 1.0 / np.where(big, t, 1.0), 0.0))
    w_first = np.where(big, sigma, 1.0)
    w_second = np.where(big, 1.0, tau)
    P = w_first[..., None] * first + w_second[..., None] * second
    P /= np.linalg.norm(P, axis=-1, keepdims=True)
    val, grad = surface.compiled.value_grad(P)
    gnorm = np.linalg.norm(grad, axis=-1)
    residual = np.abs(val) / np.maximum(surface.coefficient_scale, 1e-300)
    if d > 1:
        i, j = np.triu_indices(d, 1)
        sep = np.min(fs_sine_distance(P[:, i], P[:, j]), axis=1)
    else:
        sep = np.full(len(P), np.inf)
    bad = degenerate | (sep < SEPARATION_TOL) | ~np.all(np.isfinite(P), axis=(1, 2))
    bad |= np.any(gnorm == 0, axis=1)
    return LineIntersection(points=P, residual=residual, separation=sep,
                            leading=lead / np.maximum(scale, 1e-300), resample=bad)


def line_intersection(F, L: ProjectiveLine) -> LineIntersection:
    """Intersection of a single line with the hypersurface ``F`` (a Polynomial or Hypersurface)."""
    surface = F if isinstance(F, Hypersurface) else Hypersurface(F)
    return intersect_lines(surface, L.a[None], L.b[None])
