"""Douglas-Rachford and ISTA iteration engines with trace recording.

Two DR families act on a splitting h = f + g with f strongly convex and g
weakly convex (modulus rho):

* ``dr-main-*``  relaxed double reflection of the plain proximity operators;
  step gate alpha <= 1/sqrt(sigma*rho), where sigma is the gradient Lipschitz
  constant of f.  The ``fg`` order applies the f-reflection last and extracts
  the primal point as prox_g(z); ``gf`` swaps the order and extracts prox_f(z).
* ``dr-shift-*``  the same double reflection built from the proxes of the
  convexified pair g + (rho/2)|.|^2 and f - (rho/2)|.|^2; step gate
  alpha*rho < 1 (strict).  Extraction uses the corresponding shifted prox.

``ista`` is the forward-backward baseline x <- prox_g(x - alpha grad f(x)).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import DivergenceError, StepSizeError

MAIN_VARIANTS = ("dr-main-fg", "dr-main-gf")
SHIFT_VARIANTS = ("dr-shift-fg", "dr-shift-gf")
DR_VARIANTS = MAIN_VARIANTS + SHIFT_VARIANTS
VARIANTS = DR_VARIANTS + ("ista",)

# Margin below the step-size bound used when no explicit alpha is given.
DEFAULT_ALPHA_FRACTION = 0.99


@dataclass(frozen=True)
class Problem:
    """A splitting h = f + g: ``smooth`` is the f-side, ``penalty`` the g-side."""

    smooth: object
    penalty: object

    @property
    def dim(self) -> int:
        return self.smooth.dim

    @property
    def rho(self) -> float:
        return float(self.penalty.modulus)

    @property
    def grad_lipschitz(self):
        return getattr(self.smooth, "grad_lipschitz", None)

    @property
    def strong_convexity(self):
        return getattr(self.smooth, "strong_convexity", None)

    def cost(self, x) -> float:
        return self.smooth.value(x) + self.penalty.value(x)

    def has_gradient(self) -> bool:
        return callable(getattr(self.smooth, "grad", None))

    def fixed_point_residual(self, x, alpha: float) -> float:
        """|| x - prox_g(x - alpha grad f(x), alpha) ||, zero exactly at minimizers."""
        step = np.asarray(x, dtype=float) - alpha * self.smooth.grad(x)
        return float(np.linalg.norm(np.asarray(x, dtype=float) - self.penalty.prox(step, alpha)))


class StepCheck(NamedTuple):
    ok: bool
    bound: float


def validate_step_main(alpha: float, sigma: float, rho: float) -> StepCheck:
    """Gate for the direct variants: alpha <= 1/sqrt(sigma*rho), inclusive.

    With rho = 0 the bound is infinite and every positive alpha passes.
    """
    if rho < 0 or sigma < rho:
        raise ValueError(f"need sigma >= rho >= 0, got sigma={sigma}, rho={rho}")
    bound = math.inf if rho == 0 else 1.0 / math.sqrt(sigma * rho)
    return StepCheck(0 < alpha <= bound, bound)


def validate_step_shift(alpha: float, rho: float) -> StepCheck:
    """Gate for the shifted variants: alpha * rho < 1, strict."""
    if rho < 0:
        raise ValueError(f"rho must be nonnegative, got {rho}")
    bound = math.inf if rho == 0 else 1.0 / rho
    return StepCheck(0 < alpha and alpha * rho < 1.0, bound)


def step_bound(variant: str, sigma, rho: float) -> float:
    """Upper step bound of a variant (may be infinite)."""
    if variant in MAIN_VARIANTS:
        if sigma is None:
            raise StepSizeError(f"{variant} needs the gradient Lipschitz constant of the smooth term")
        return validate_step_main(0.0, sigma, rho).bound
    if variant in SHIFT_VARIANTS:
        return validate_step_shift(0.0, rho).bound
    if variant == "ista":
        if sigma is None:
            raise StepSizeError("ista needs the gradient Lipschitz constant of the smooth term")
        return 1.0 / sigma
    raise ValueError(f"unknown variant {variant!r}")


def _check_gate(problem: Problem, variant: str, alpha: float) -> None:
    rho = problem.rho
    if variant in MAIN_VARIANTS:
        sigma = problem.grad_lipschitz
        if sigma is None:
            raise StepSizeError(f"{variant} needs the gradient Lipschitz constant of the smooth term")
        check = validate_step_main(alpha, sigma, rho)
        if not check.ok:
            raise StepSizeError(f"alpha = {alpha:.6g} violates the bound 1/sqrt(sigma*rho) = {check.bound:.6g}")
    elif variant in SHIFT_VARIANTS:
        check = validate_step_shift(alpha, rho)
        if not check.ok:
            raise StepSizeError(f"alpha = {alpha:.6g} violates the strict bound 1/rho = {check.bound:.6g}")
    elif variant == "ista":
        sigma = problem.grad_lipschitz
        if sigma is None or not problem.has_gradient():
            raise StepSizeError("ista needs a differentiable smooth term")
        if not 0 < alpha <= 1.0 / sigma:
            raise StepSizeError(f"alpha = {alpha:.6g} violates the ista bound 1/sigma = {1.0 / sigma:.6g}")
    else:
        raise ValueError(f"unknown variant {variant!r}")


def default_alpha(problem: Problem, variant: str) -> float:
    """0.99x the variant's step bound; falls back to 1/sigma when unbounded."""
    sigma = problem.grad_lipschitz
    if variant == "ista":
        if sigma is None:
            raise StepSizeError("ista needs the gradient Lipschitz constant of the smooth term")
        return 1.0 / sigma
    bound = step_bound(variant, sigma, problem.rho)
    if math.isfinite(bound):
        return DEFAULT_ALPHA_FRACTION * bound
    if sigma is not None:
        return 1.0 / sigma
    raise StepSizeError(f"{variant} has no finite step bound here; pass alpha explicitly")


def reflect(prox_op: Callable, z, alpha: float) -> np.ndarray:
    """Reflected prox 2*prox(z) - z for a prox callable (z, alpha) -> x."""
    z = np.asarray(z, dtype=float)
    return 2.0 * prox_op(z, alpha) - z


def double_reflection(problem: Problem, alpha: float, variant: str) -> Callable:
    """The unrelaxed composition of the variant's two reflections.

    For ``dr-main-fg`` / ``dr-shift-fg`` this is the raw double-reflection
    operator whose contraction rates the rate calculators bound.
    """
    f, g = problem.smooth, problem.penalty
    rho = problem.rho
    if variant == "dr-main-fg":
        first, second = (lambda z: g.prox(z, alpha)), (lambda z: f.prox(z, alpha))
    elif variant == "dr-main-gf":
        first, second = (lambda z: f.prox(z, alpha)), (lambda z: g.prox(z, alpha))
    elif variant == "dr-shift-fg":
        first, second = (lambda z: g.shifted_prox(z, alpha)), (lambda z: f.shifted_prox(z, alpha, rho))
    elif variant == "dr-shift-gf":
        first, second = (lambda z: f.shifted_prox(z, alpha, rho)), (lambda z: g.shifted_prox(z, alpha))
    else:
        raise ValueError(f"unknown double-reflection variant {variant!r}")

    def op(z):
        z = np.asarray(z, dtype=float)
        w = 2.0 * first(z) - z
        return 2.0 * second(w) - w

    return op


def primal_extraction(problem: Problem, alpha: float, variant: str) -> Callable:
    """Map from the driver iterate z to the variant's primal point."""
    f, g = problem.smooth, problem.penalty
    rho = problem.rho
    if variant == "dr-main-fg":
        return lambda z: g.prox(z, alpha)
    if variant == "dr-main-gf":
        return lambda z: f.prox(z, alpha)
    if variant == "dr-shift-fg":
        return lambda z: g.shifted_prox(z, alpha)
    if variant == "dr-shift-gf":
        return lambda z: f.shifted_prox(z, alpha, rho)
    if variant == "ista":
        return lambda z: z
    raise ValueError(f"unknown variant {variant!r}")


def _relaxed_step(problem, z, alpha, relaxation, variant):
    _check_gate(problem, variant, alpha)
    if not 0.0 < relaxation < 1.0:
        raise ValueError(f"relaxation must lie in (0, 1), got {relaxation}")
    z = np.asarray(z, dtype=float)
    return (1.0 - relaxation) * z + relaxation * double_reflection(problem, alpha, variant)(z)


def dr_step_main_fg(problem, z, alpha, relaxation=0.5):
    """One relaxed step of the direct variant with the f-reflection outermost."""
    return _relaxed_step(problem, z, alpha, relaxation, "dr-main-fg")


def dr_step_main_gf(problem, z, alpha, relaxation=0.5):
    """One relaxed step of the direct variant with the g-reflection outermost."""
    return _relaxed_step(problem, z, alpha, relaxation, "dr-main-gf")


def dr_step_shift_fg(problem, z, alpha, relaxation=0.5):
    """One relaxed step of the quadratic-shifted variant, f-side outermost."""
    return _relaxed_step(problem, z, alpha, relaxation, "dr-shift-fg")


def dr_step_shift_gf(problem, z, alpha, relaxation=0.5):
    """One relaxed step of the quadratic-shifted variant, g-side outermost."""
    return _relaxed_step(problem, z, alpha, relaxation, "dr-shift-gf")


def ista_step(problem, x, alpha):
    """Forward-backward step prox_g(x - alpha grad f(x))."""
    _check_gate(problem, "ista", alpha)
    x = np.asarray(x, dtype=float)
    return problem.penalty.prox(x - alpha * problem.smooth.grad(x), alpha)


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters: variant, step alpha (None = variant default),
    relaxation weight in (0,1), iteration/tolerance limits, and an optional
    reference point for distance recording."""

    variant: str
    alpha: float | None = None
    relaxation: float = 0.5
    max_iters: int = 1000
    tol: float = 0.0
    record_reference: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; pick one of {VARIANTS}")
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be nonnegative, got {self.max_iters}")
        if self.tol < 0:
            raise ValueError(f"tol must be nonnegative, got {self.tol}")
        if self.variant != "ista" and not 0.0 < self.relaxation < 1.0:
            raise ValueError(f"relaxation must lie in (0, 1), got {self.relaxation}")


@dataclass
class IterationTrace:
    """Per-iteration history of a solver run plus the final points.

    Row n holds the cost at the primal extraction of iterate n, the step norm
    ||z^n - z^(n-1)|| (nan at n = 0), the fixed-point residual at the audit
    step 1/sigma (nan when the smooth term has no gradient), and the distance
    to the reference point when one was given.
    """

    variant: str
    alpha: float
    relaxation: float
    max_iters: int
    tol: float
    iterations: np.ndarray
    cost: np.ndarray
    step_norm: np.ndarray
    fp_residual: np.ndarray
    dist_to_ref: np.ndarray
    final_x: np.ndarray
    final_z: np.ndarray
    converged: bool

    @property
    def n_iters(self) -> int:
        return int(self.iterations[-1])

    @property
    def final_cost(self) -> float:
        return float(self.cost[-1])

    def iterations_to(self, threshold: float):
        """First iteration index with dist_to_ref <= threshold, else None."""
        hits = np.nonzero(self.dist_to_ref <= threshold)[0]
        return int(self.iterations[hits[0]]) if hits.size else None

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iter,cost,step_norm,fp_residual,dist_to_ref\n")
            for i in range(self.iterations.size):
                fh.write(
                    f"{int(self.iterations[i])},{self.cost[i]:.17g},{self.step_norm[i]:.17g},"
                    f"{self.fp_residual[i]:.17g},{self.dist_to_ref[i]:.17g}\n"
                )

    def config_dict(self) -> dict:
        return {
            "variant": self.variant,
            "alpha": self.alpha,
            "relaxation": self.relaxation,
            "max_iters": self.max_iters,
            "tol": self.tol,
        }

    def to_json_dict(self) -> dict:
        return {
            "config": self.config_dict(),
            "iterations": self.n_iters,
            "converged": self.converged,
            "final_cost": self.final_cost,
            "final_x": [float(v) for v in self.final_x],
            "final_z": [float(v) for v in self.final_z],
        }

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)


def run(problem: Problem, config: SolverConfig) -> IterationTrace:
    """Iterate the configured variant from z0 = 0 until tol or max_iters.

    Records cost, step norm, fixed-point residual, and reference distance at
    every iterate (including the initial point).  Raises DivergenceError as
    soon as an iterate stops being finite, and StepSizeError when alpha fails
    the variant's gate.
    """
    alpha = config.alpha if config.alpha is not None else default_alpha(problem, config.variant)
    _check_gate(problem, config.variant, alpha)

    reference = None
    if config.record_reference is not None:
        reference = np.asarray(config.record_reference, dtype=float)
        if reference.size != problem.dim:
            raise ValueError(
                f"reference has {reference.size} entries, problem dimension is {problem.dim}"
            )

    if config.variant == "ista":
        step = lambda x: problem.penalty.prox(x - alpha * problem.smooth.grad(x), alpha)
    else:
        operator = double_reflection(problem, alpha, config.variant)
        lam = config.relaxation
        step = lambda z: (1.0 - lam) * z + lam * operator(z)
    extract = primal_extraction(problem, alpha, config.variant)

    # Residuals are audited at a fixed step so they compare across variants.
    sigma = problem.grad_lipschitz
    audit_alpha = None
    if problem.has_gradient() and sigma is not None and problem.rho < sigma:
        audit_alpha = 1.0 / sigma

    cost, step_norms, residuals, dists = [], [], [], []

    def record(x, step_norm):
        cost.append(problem.cost(x))
        step_norms.append(step_norm)
        residuals.append(
            problem.fixed_point_residual(x, audit_alpha) if audit_alpha is not None else math.nan
        )
        dists.append(float(np.linalg.norm(x - reference)) if reference is not None else math.nan)

    z = np.zeros(problem.dim)
    x = extract(z)
    record(x, math.nan)
    converged = False
    for n in range(1, config.max_iters + 1):
        try:
            z_new = step(z)
        except (ValueError, FloatingPointError) as exc:
            # overflow inside a prox solve surfaces as a non-finite-input error
            raise DivergenceError(
                f"non-finite value at iteration {n} of {config.variant}: {exc}"
            ) from exc
        if not np.all(np.isfinite(z_new)):
            raise DivergenceError(f"non-finite iterate at iteration {n} of {config.variant}")
        delta = float(np.linalg.norm(z_new - z))
        z = z_new
        x = extract(z)
        record(x, delta)
        if delta <= config.tol:
            converged = True
            break

    n_rows = len(cost)
    return IterationTrace(
        variant=config.variant,
        alpha=alpha,
        relaxation=config.relaxation,
        max_iters=config.max_iters,
        tol=config.tol,
        iterations=np.arange(n_rows),
        cost=np.asarray(cost),
        step_norm=np.asarray(step_norms),
        fp_residual=np.asarray(residuals),
        dist_to_ref=np.asarray(dists),
        final_x=x,
        final_z=z.copy(),
        converged=converged,
    )
