"""Weakly convex separable penalties and their (shifted) proximity operators.

A penalty g is rho-weakly convex when g + (rho/2)|.|^2 is convex.  Every
penalty here exposes

    value(x)            sum of the pointwise penalty over coordinates
    pointwise(t)        elementwise penalty values
    prox(x, alpha)      argmin_z  |z - x|^2 / (2 alpha) + g(z), elementwise
    shifted_prox(x, alpha)  prox of the convexified g + (modulus/2)|.|^2
    modulus             the weak-convexity modulus rho

``shifted_prox`` is the operator used by the quadratic-shifted splitting: for
beta = alpha / (1 + alpha rho) it equals ``prox(x * beta / alpha, beta)``, and
its step gate ``beta * rho < 1`` holds for every alpha > 0.
"""

from __future__ import annotations

import numpy as np

from .errors import StepSizeError


class SeparablePenalty:
    """Base class: coordinatewise penalty with a known weak-convexity modulus."""

    modulus: float = 0.0

    def pointwise(self, t):
        raise NotImplementedError

    def prox(self, x, alpha: float):
        raise NotImplementedError

    def value(self, x) -> float:
        return float(np.sum(self.pointwise(np.asarray(x, dtype=float))))

    def shifted_prox(self, x, alpha: float):
        if alpha <= 0:
            raise StepSizeError(f"alpha must be positive, got {alpha}")
        scale = 1.0 + alpha * self.modulus
        return self.prox(np.asarray(x, dtype=float) / scale, alpha / scale)


class FirmPenalty(SeparablePenalty):
    """Penalty whose proximity operator is the firm threshold.

    Pointwise value tau*|t| - rho*t^2/2 inside |t| < tau/rho, constant
    tau^2/(2 rho) outside; rho-weakly convex, bounded, even, and
    nondecreasing in |t|.
    """

    def __init__(self, tau: float, rho: float):
        if not (tau > 0 and np.isfinite(tau)):
            raise ValueError(f"tau must be positive, got {tau}")
        if not (rho > 0 and np.isfinite(rho)):
            raise ValueError(f"rho must be positive, got {rho}")
        self.tau = float(tau)
        self.rho = float(rho)
        self.modulus = self.rho

    def pointwise(self, t):
        t = np.asarray(t, dtype=float)
        a = np.abs(t)
        plateau = self.tau**2 / (2.0 * self.rho)
        return np.where(a < self.tau / self.rho, self.tau * a - 0.5 * self.rho * a * a, plateau)

    def prox(self, x, alpha: float):
        """Firm threshold: dead zone below alpha*tau, expansive middle band,
        identity above tau/rho.  Requires alpha * rho < 1."""
        if alpha <= 0:
            raise StepSizeError(f"alpha must be positive, got {alpha}")
        if alpha * self.rho >= 1.0:
            raise StepSizeError(
                f"alpha * rho = {alpha * self.rho:.6g} >= 1: the prox is not single-valued"
            )
        x = np.asarray(x, dtype=float)
        a = np.abs(x)
        middle = np.sign(x) * (a - alpha * self.tau) / (1.0 - alpha * self.rho)
        return np.where(a < alpha * self.tau, 0.0, np.where(a < self.tau / self.rho, middle, x))

    def __repr__(self):
        return f"FirmPenalty(tau={self.tau!r}, rho={self.rho!r})"


class SoftPenalty(SeparablePenalty):
    """Scaled absolute value tau*|t|; the rho -> 0 limit of the firm penalty."""

    modulus = 0.0

    def __init__(self, tau: float):
        if not (tau > 0 and np.isfinite(tau)):
            raise ValueError(f"tau must be positive, got {tau}")
        self.tau = float(tau)

    def pointwise(self, t):
        return self.tau * np.abs(np.asarray(t, dtype=float))

    def prox(self, x, alpha: float):
        if alpha <= 0:
            raise StepSizeError(f"alpha must be positive, got {alpha}")
        x = np.asarray(x, dtype=float)
        return np.sign(x) * np.maximum(np.abs(x) - alpha * self.tau, 0.0)

    def __repr__(self):
        return f"SoftPenalty(tau={self.tau!r})"


class ZeroPenalty(SeparablePenalty):
    """g identically zero; prox is the identity."""

    modulus = 0.0

    def pointwise(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def prox(self, x, alpha: float):
        return np.asarray(x, dtype=float).copy()

    def __repr__(self):
        return "ZeroPenalty()"


class QuadraticPlusPenalty:
    """g(x) = 0.5*||y - x||^2 + phi(x) for a separable penalty phi.

    Used when the quadratic data term is absorbed into the penalty side so
    that the other side can hold a nonsmooth constraint.  The unit quadratic
    contributes strong convexity 1, so the composite modulus is
    max(phi.modulus - 1, 0); for phi.modulus < 1 the composite is convex.
    The prox reduces to a rescaled prox of phi by completing the square:

        prox_g(x, a) = prox_phi((x + a*y) / (1 + a), a / (1 + a)).
    """

    def __init__(self, y, base: SeparablePenalty):
        self.y = np.asarray(y, dtype=float).copy()
        if self.y.ndim != 1:
            raise ValueError(f"expected a 1-d observation, got shape {self.y.shape}")
        self.y.setflags(write=False)
        self.base = base
        self.modulus = max(base.modulus - 1.0, 0.0)

    def value(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return 0.5 * float(np.sum((self.y - x) ** 2)) + self.base.value(x)

    def prox(self, x, alpha: float):
        if alpha <= 0:
            raise StepSizeError(f"alpha must be positive, got {alpha}")
        x = np.asarray(x, dtype=float)
        return self.base.prox((x + alpha * self.y) / (1.0 + alpha), alpha / (1.0 + alpha))

    def shifted_prox(self, x, alpha: float):
        if alpha <= 0:
            raise StepSizeError(f"alpha must be positive, got {alpha}")
        scale = 1.0 + alpha * self.modulus
        return self.prox(np.asarray(x, dtype=float) / scale, alpha / scale)

    def __repr__(self):
        return f"QuadraticPlusPenalty(n={self.y.size}, base={self.base!r})"


def shifted_prox_weak(penalty, x, alpha: float):
    """Prox of the convexified penalty g + (modulus/2)|.|^2 at step alpha."""
    return penalty.shifted_prox(x, alpha)
