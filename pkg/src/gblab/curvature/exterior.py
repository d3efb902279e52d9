"""Dense complexified exterior algebra on ``dz_1..dz_n, dzbar_1..dzbar_n`` (n <= 3).

A form is an array of shape ``(..., 4**n)``: the last axis is indexed by bitmasks of
generators (bit ``k`` is ``dz_{k+1}``, bit ``n+k`` is ``dzbar_{k+1}``), each basis
element being the wedge of its generators in increasing bit order.  Leading axes
are batch axes, so the same code serves single points and sample batches.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations

import numpy as np

MAX_DIM = 3


def _perm_sign(seq: list[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _bits(mask: int) -> list[int]:
    return [k for k in range(mask.bit_length()) if mask >> k & 1]


class _Tables:
    def __init__(self, n: int):
        if not 1 <= n <= MAX_DIM:
            raise ValueError(f"exterior algebra supports 1 <= n <= {MAX_DIM}, got {n}")
        self.n = n
        self.size = size = 4 ** n
        self.degree = np.array([bin(m).count("1") for m in range(size)])
        pa, pb, sg, tgt = [], [], [], []
        for a in range(size):
            for b in range(size):
                if a & b:
                    continue
                pa.append(a)
                pb.append(b)
                sg.append(_perm_sign(_bits(a) + _bits(b)))
                tgt.append(a | b)
        self.pa = np.array(pa)
        self.pb = np.array(pb)
        self.sign = np.array(sg, dtype=float)
        scatter = np.zeros((len(pa), size))
        scatter[np.arange(len(pa)), tgt] = 1.0
        self.scatter = scatter
        # conjugation: dz_k <-> dzbar_k
        swap = lambda g: g + n if g < n else g - n  # noqa: E731
        cperm, csign = np.zeros(size, dtype=int), np.zeros(size)
        for m in range(size):
            img = [swap(g) for g in _bits(m)]
            cperm[m] = sum(1 << g for g in img)
            csign[m] = _perm_sign(img)
        self.conj_target, self.conj_sign = cperm, csign
        self.top = size - 1
        interleaved = [g for k in range(n) for g in (k, n + k)]
        # dz1..dzn dzbar1..dzbarn = sign * (dz1 dzbar1 ... dzn dzbarn)
        self.top_to_interleaved = _perm_sign(interleaved)


@lru_cache(maxsize=None)
def tables(n: int) -> _Tables:
    return _Tables(n)


def _active(x: np.ndarray, size: int) -> np.ndarray:
    return np.any(x.reshape(-1, size) != 0, axis=0)


def wedge_arrays(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    t = tables(n)
    # only generator pairs that are nonzero somewhere in the batch contribute
    sel = np.flatnonzero(_active(a, t.size)[t.pa] & _active(b, t.size)[t.pb])
    shape = np.broadcast_shapes(a.shape, b.shape)
    if len(sel) == 0:
        return np.zeros(shape, dtype=np.result_type(a, b, complex))
    prod = a[..., t.pa[sel]] * b[..., t.pb[sel]] * t.sign[sel]
    return prod @ t.scatter[sel]


def conjugate_array(a: np.ndarray, n: int) -> np.ndarray:
    t = tables(n)
    out = np.zeros_like(a)
    out[..., t.conj_target] = np.conj(a) * t.conj_sign
    return out


def one_array(n: int, batch_shape=()) -> np.ndarray:
    out = np.zeros(tuple(batch_shape) + (4 ** n,), dtype=complex)
    out[..., 0] = 1.0
    return out


def pair_mask(n: int, k: int, l: int) -> int:
    """Mask of ``dz_k ^ dzbar_l`` (0-based indices); its sign in canonical order is +1."""
    return (1 << k) | (1 << (n + l))


class ExteriorForm:
    """A (batched) element of the exterior algebra; see the module docstring for layout."""

    __array_priority__ = 1000

    def __init__(self, n: int, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape[-1:] != (4 ** n,):
            raise ValueError(f"last axis must have length {4 ** n}")
        self.n = n
        self.coeffs = coeffs

    @classmethod
    def one(cls, n: int, batch_shape=()) -> "ExteriorForm":
        return cls(n, one_array(n, batch_shape))

    @classmethod
    def zero(cls, n: int, batch_shape=()) -> "ExteriorForm":
        return cls(n, np.zeros(tuple(batch_shape) + (4 ** n,), dtype=complex))

    @classmethod
    def dz_dzbar(cls, n: int, k: int, l: int) -> "ExteriorForm":
        f = cls.zero(n)
        f.coeffs[pair_mask(n, k, l)] = 1.0
        return f

    @property
    def batch_shape(self):
        return self.coeffs.shape[:-1]

    @property
    def degrees(self) -> set[int]:
        t = tables(self.n)
        nz = np.any(np.abs(self.coeffs.reshape(-1, t.size)) > 0, axis=0)
        return set(int(d) for d in t.degree[nz])

    def _other(self, other) -> np.ndarray:
        if isinstance(other, ExteriorForm):
            if other.n != self.n:
                raise ValueError("forms live in different exterior algebras")
            return other.coeffs
        raise TypeError("expected an ExteriorForm")

    def __add__(self, other):
        return ExteriorForm(self.n, self.coeffs + self._other(other))

    def __sub__(self, other):
        return ExteriorForm(self.n, self.coeffs - self._other(other))

    def __neg__(self):
        return ExteriorForm(self.n, -self.coeffs)

    def __mul__(self, s):
        """Multiply by a scalar, or by an array of per-sample scalars shaped like the batch."""
        if isinstance(s, ExteriorForm):
            raise TypeError("use wedge() for forms")
        s = np.asarray(s)
        return ExteriorForm(self.n, self.coeffs * (s[..., None] if s.ndim else s))

    __rmul__ = __mul__

    def wedge(self, other: "ExteriorForm") -> "ExteriorForm":
        return ExteriorForm(self.n, wedge_arrays(self.coeffs, self._other(other), self.n))

    def grade(self, k: int) -> "ExteriorForm":
        t = tables(self.n)
        return ExteriorForm(self.n, np.where(t.degree == k, self.coeffs, 0))

    def conjugate(self) -> "ExteriorForm":
        return ExteriorForm(self.n, conjugate_array(self.coeffs, self.n))

    def real_type_defect(self) -> float:
        diff = np.abs(self.coeffs - conjugate_array(self.coeffs, self.n))
        scale = max(float(np.max(np.abs(self.coeffs))), 1e-300)
        return float(np.max(diff)) / scale

    def is_real_type(self, tol: float = 1e-10) -> bool:
        return self.real_type_defect() <= tol

    def top_coefficient(self) -> np.ndarray:
        """Coefficient of ``dz_1^...^dz_n^dzbar_1^...^dzbar_n``."""
        return self.coeffs[..., tables(self.n).top]

    def lebesgue_complex(self) -> np.ndarray:
        """Top coefficient in ``dz_1^dzbar_1^...^dz_n^dzbar_n`` order times ``(-2i)^n``."""
        t = tables(self.n)
        return self.coeffs[..., t.top] * t.top_to_interleaved * (-2j) ** self.n

    def __repr__(self):
        return f"ExteriorForm(n={self.n}, batch={self.batch_shape}, degrees={sorted(self.degrees)})"


def determinant(matrix: np.ndarray, n: int) -> np.ndarray:
    """Leibniz determinant of a square matrix of commuting (even) forms.

    ``matrix`` has shape ``(..., r, r, 4**n)``.
    """
    r = matrix.shape[-2]
    total = np.zeros(matrix.shape[:-3] + (4 ** n,), dtype=complex)
    for perm in permutations(range(r)):
        term = matrix[..., 0, perm[0], :]
        for i in range(1, r):
            term = wedge_arrays(term, matrix[..., i, perm[i], :], n)
        total = total + _perm_sign(list(perm)) * term
    return total


def pfaffian(matrix: np.ndarray, n: int) -> np.ndarray:
    """Pfaffian of an antisymmetric ``2k x 2k`` matrix of commuting (even) forms."""
    idx = list(range(matrix.shape[-2]))
    return _pf(matrix, idx, n)


def _pf(matrix: np.ndarray, idx: list[int], n: int) -> np.ndarray:
    if not idx:
        return one_array(n, matrix.shape[:-3])
    if len(idx) % 2:
        raise ValueError("Pfaffian needs an even-sized matrix")
    first, rest = idx[0], idx[1:]
    total = np.zeros(matrix.shape[:-3] + (4 ** n,), dtype=complex)
    for pos, j in enumerate(rest):
        sub = rest[:pos] + rest[pos + 1:]
        term = wedge_arrays(matrix[..., first, j, :], _pf(matrix, sub, n), n)
        total = total + (-1) ** pos * term
    return total
