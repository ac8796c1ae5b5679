"""Strongly convex data-fidelity terms and subspace-constrained variants.

Smooth terms expose ``value``, ``prox``, ``shifted_prox`` and, when the term
is differentiable, ``grad`` plus the curvature constants ``strong_convexity``
(s) and ``grad_lipschitz`` (sigma).  ``shifted_prox(x, alpha, rho)`` is the
prox of f - (rho/2)|.|^2, computed through the rescaling

    prox_{f - rho/2|.|^2}(x, a) = prox_f(x / (1 - a rho), a / (1 - a rho)),

valid for a*rho < 1 and rho not exceeding the strong convexity of f.
"""

from __future__ import annotations

import threading

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import NonConvexShiftError, StepSizeError
from .linalg import LinearMap, as_vector


def support_mask(dim: int, support) -> np.ndarray:
    """Boolean mask of length ``dim`` from an iterable of coordinate indices."""
    mask = np.zeros(dim, dtype=bool)
    idx = np.asarray(sorted(set(int(i) for i in support)), dtype=int)
    if idx.size:
        if idx[0] < 0 or idx[-1] >= dim:
            raise ValueError(f"support indices must lie in [0, {dim})")
        mask[idx] = True
    return mask


def project_onto_support(x, support) -> np.ndarray:
    """Orthogonal projection onto a coordinate subspace (prox of its indicator)."""
    x = as_vector(x)
    return np.where(support_mask(x.size, support), x, 0.0)


def _shifted_prox(term, x, alpha: float, rho: float):
    if alpha <= 0:
        raise StepSizeError(f"alpha must be positive, got {alpha}")
    if rho < 0:
        raise ValueError(f"rho must be nonnegative, got {rho}")
    if alpha * rho >= 1.0:
        raise StepSizeError(f"alpha * rho = {alpha * rho:.6g} >= 1: shifted prox undefined")
    s = term.strong_convexity
    if s is not None and rho > s:
        raise NonConvexShiftError(
            f"shift rho = {rho:.6g} exceeds the strong convexity s = {s:.6g}"
        )
    scale = 1.0 - alpha * rho
    return term.prox(np.asarray(x, dtype=float) / scale, alpha / scale)


class QuadraticTerm:
    """f(x) = 0.5 * ||y - H x||^2 for a full-column-rank operator H.

    Strongly convex with modulus s = lambda_min(HᵀH); the gradient is
    Lipschitz with constant sigma = lambda_max(HᵀH).  Prox evaluations solve
    (I + alpha HᵀH) z = x + alpha Hᵀy with a Cholesky factorization cached
    per step value, so iterating at a fixed step factorizes once.
    """

    def __init__(self, operator, y):
        if not isinstance(operator, LinearMap):
            operator = LinearMap(operator)
        self.operator = operator
        self.y = as_vector(y).copy()
        if self.y.size != operator.rows:
            raise ValueError(
                f"dimension mismatch: operator has {operator.rows} rows, y has {self.y.size}"
            )
        self.y.setflags(write=False)
        self._gram = operator.gram()
        self._hty = operator.adjoint_apply(self.y)
        self._factors: dict[float, tuple] = {}
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self.operator.cols

    @property
    def strong_convexity(self) -> float:
        return self.operator.gram_extremes()[0]

    @property
    def grad_lipschitz(self) -> float:
        return self.operator.gram_extremes()[1]

    def value(self, x) -> float:
        r = self.y - self.operator.apply(x)
        return 0.5 * float(r @ r)

    def grad(self, x) -> np.ndarray:
        x = as_vector(x)
        return self._gram @ x - self._hty

    def _factor(self, alpha: float):
        factor = self._factors.get(alpha)
        if factor is None:
            a = np.eye(self.dim) + alpha * self._gram
            with self._lock:
                factor = self._factors.setdefault(alpha, cho_factor(a))
        return factor

    def prox(self, x, alpha: float) -> np.ndarray:
        if alpha <= 0:
            raise StepSizeError(f"alpha must be positive, got {alpha}")
        x = as_vector(x)
        return cho_solve(self._factor(alpha), x + alpha * self._hty)

    def shifted_prox(self, x, alpha: float, rho: float) -> np.ndarray:
        return _shifted_prox(self, x, alpha, rho)


class SubspaceQuadraticTerm:
    """f(x) = 0.5 * ||y - x||^2 + i_K(x) for a coordinate subspace K.

    Not differentiable (the indicator), so it cannot drive gradient-based
    iterations; its prox is the projected shrinkage
    P_K((z + alpha*y) / (1 + alpha)).
    """

    def __init__(self, y, support):
        self.y = as_vector(y).copy()
        self.y.setflags(write=False)
        self.mask = support_mask(self.y.size, support)
        self.mask.setflags(write=False)
        # On K the quadratic keeps its unit curvature.
        self.strong_convexity = 1.0
        self.grad_lipschitz = None

    @property
    def dim(self) -> int:
        return self.y.size

    def value(self, x) -> float:
        x = as_vector(x)
        if np.any(x[~self.mask] != 0.0):
            return float("inf")
        return 0.5 * float(np.sum((self.y - x) ** 2))

    def prox(self, z, alpha: float) -> np.ndarray:
        if alpha <= 0:
            raise StepSizeError(f"alpha must be positive, got {alpha}")
        z = as_vector(z)
        return np.where(self.mask, (z + alpha * self.y) / (1.0 + alpha), 0.0)

    def shifted_prox(self, x, alpha: float, rho: float) -> np.ndarray:
        return _shifted_prox(self, x, alpha, rho)


class SubspaceConstraint:
    """f = i_K, the indicator of a coordinate subspace; prox is the projection."""

    def __init__(self, dim: int, support):
        self.mask = support_mask(dim, support)
        self.mask.setflags(write=False)
        self.strong_convexity = 0.0
        self.grad_lipschitz = None

    @property
    def dim(self) -> int:
        return self.mask.size

    def value(self, x) -> float:
        x = as_vector(x)
        return 0.0 if not np.any(x[~self.mask] != 0.0) else float("inf")

    def prox(self, z, alpha: float) -> np.ndarray:
        return np.where(self.mask, as_vector(z), 0.0)

    def shifted_prox(self, x, alpha: float, rho: float) -> np.ndarray:
        return _shifted_prox(self, x, alpha, rho)


def quad_prox(term: QuadraticTerm, x, alpha: float) -> np.ndarray:
    """Prox of the quadratic data term (SPD solve, factorization cached)."""
    return term.prox(x, alpha)


def shifted_prox_strong(term, x, alpha: float, rho: float) -> np.ndarray:
    """Prox of f - (rho/2)|.|^2 at step alpha (the quadratic-shifted operator)."""
    return _shifted_prox(term, x, alpha, rho)
