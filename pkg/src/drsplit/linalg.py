"""Dense linear algebra substrate: convolution operators, Gram spectra, SPD solves.

Vectors and matrices are plain float64 ``numpy`` arrays; ``LinearMap`` wraps a
dense matrix together with lazily cached extreme eigenvalues of its Gram matrix.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import FactorizationError, InvalidFilterError, RankDeficiencyError

# Relative floor under which the least Gram eigenvalue counts as zero.
RANK_TOL = 1e-12


def as_vector(x) -> np.ndarray:
    """Coerce to a 1-d float64 array."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    return v


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d float64 array."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def convolution_matrix(filter_taps, signal_len: int) -> np.ndarray:
    """Build the full (zero-padded) linear convolution matrix.

    The result M has shape ``(signal_len + len(filter_taps) - 1, signal_len)``
    with ``M[i, j] = filter_taps[i - j]`` where defined, so ``M @ x`` equals
    ``np.convolve(filter_taps, x)``.  For any nonzero filter the matrix is tall
    with full column rank.
    """
    h = as_vector(filter_taps)
    if h.size == 0 or not np.any(h != 0.0):
        raise InvalidFilterError("filter must contain at least one nonzero tap")
    if not np.all(np.isfinite(h)):
        raise InvalidFilterError("filter taps must be finite")
    if signal_len < 1:
        raise ValueError(f"signal_len must be >= 1, got {signal_len}")
    out = np.zeros((signal_len + h.size - 1, signal_len))
    for j in range(signal_len):
        out[j : j + h.size, j] = h
    return out


class LinearMap:
    """Immutable dense operator with cached extreme Gram eigenvalues."""

    def __init__(self, matrix):
        m = as_matrix(matrix).copy()
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        m.setflags(write=False)
        self.matrix = m
        self._gram: np.ndarray | None = None
        self._extremes: tuple[float, float] | None = None

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def apply(self, x) -> np.ndarray:
        x = as_vector(x)
        if x.size != self.cols:
            raise ValueError(f"dimension mismatch: operator has {self.cols} columns, vector has {x.size}")
        return self.matrix @ x

    def adjoint_apply(self, v) -> np.ndarray:
        v = as_vector(v)
        if v.size != self.rows:
            raise ValueError(f"dimension mismatch: operator has {self.rows} rows, vector has {v.size}")
        return self.matrix.T @ v

    def gram(self) -> np.ndarray:
        """The (cached) Gram matrix HᵀH."""
        if self._gram is None:
            g = self.matrix.T @ self.matrix
            g = 0.5 * (g + g.T)
            g.setflags(write=False)
            self._gram = g
        return self._gram

    def gram_extremes(self) -> tuple[float, float]:
        """Least and greatest eigenvalue (s, sigma) of HᵀH.

        Raises RankDeficiencyError when the least eigenvalue is numerically
        zero relative to the greatest, i.e. the induced quadratic is not
        strongly convex.
        """
        if self._extremes is None:
            w = np.linalg.eigvalsh(self.gram())
            s, sigma = float(w[0]), float(w[-1])
            if s <= RANK_TOL * sigma:
                raise RankDeficiencyError(
                    f"Gram matrix is rank deficient (lambda_min={s:.3e}, lambda_max={sigma:.3e})"
                )
            self._extremes = (s, sigma)
        return self._extremes


def gram_extreme_eigenvalues(op: LinearMap) -> tuple[float, float]:
    """(s, sigma) = extreme eigenvalues of the operator's Gram matrix."""
    return op.gram_extremes()


def solve_spd(a, b) -> np.ndarray:
    """Solve A z = b for symmetric positive definite A via Cholesky."""
    a = as_matrix(a)
    b = as_vector(b)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if a.shape[0] != b.size:
        raise ValueError(f"dimension mismatch: matrix is {a.shape}, vector has {b.size}")
    if not np.allclose(a, a.T, rtol=1e-10, atol=1e-12):
        raise FactorizationError("matrix is not symmetric")
    try:
        factor = cho_factor(a)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(f"Cholesky factorization failed: {exc}") from exc
    return cho_solve(factor, b)
