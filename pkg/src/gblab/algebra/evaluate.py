"""Vectorized evaluation of a polynomial and its first two derivatives on point batches."""

from __future__ import annotations

import numpy as np

from .polynomial import Polynomial


class CompiledPolynomial:
    """A :class:`Polynomial` lowered to numpy arrays.

    Value, gradient and Hessian share one monomial table, so a call costs a single
    gather-and-product over the distinct monomials plus one matrix product.
    """

    def __init__(self, P: Polynomial, derivatives: int = 2):
        self.polynomial = P
        self.num_vars = k = P.num_vars
        self.derivatives = derivatives
        polys = [P]
        if derivatives >= 1:
            grads = [P.diff(a) for a in range(k)]
            polys += grads
        if derivatives >= 2:
            polys += [g.diff(b) for g in grads for b in range(k)]
        monos = sorted({e for p in polys for e in p.terms})
        if not monos:
            monos = [(0,) * k]
        index = {e: i for i, e in enumerate(monos)}
        coef = np.zeros((len(monos), len(polys)), dtype=complex)
        for j, p in enumerate(polys):
            for e, c in p.terms.items():
                coef[index[e], j] = complex(c)
        self._exponents = np.array(monos, dtype=np.int64).reshape(len(monos), k)
        self._coef = coef
        self._maxdeg = int(self._exponents.max()) if self._exponents.size else 0
        self.degree = P.degree

    def _table(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        pw = np.empty(X.shape + (self._maxdeg + 1,), dtype=complex)
        pw[..., 0] = 1.0
        for j in range(1, self._maxdeg + 1):
            pw[..., j] = pw[..., j - 1] * X
        cols = np.arange(self.num_vars)
        mono = np.prod(pw[..., cols, self._exponents], axis=-1) if self.num_vars else \
            np.ones(X.shape[:-1] + (1,), dtype=complex)
        return mono @ self._coef

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return self._table(X)[..., 0]

    def value_grad_hess(self, X: np.ndarray):
        if self.derivatives < 2:
            raise ValueError("compiled without second derivatives")
        t = self._table(X)
        k = self.num_vars
        return t[..., 0], t[..., 1:1 + k], t[..., 1 + k:].reshape(t.shape[:-1] + (k, k))

    def value_grad(self, X: np.ndarray):
        if self.derivatives < 1:
            raise ValueError("compiled without derivatives")
        t = self._table(X)
        k = self.num_vars
        return t[..., 0], t[..., 1:1 + k]
