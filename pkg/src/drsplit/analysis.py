"""Closed-form Lipschitz/contraction bounds and empirical validation.

Conventions: s and sigma are the strong-convexity and gradient-Lipschitz
constants of the smooth term, rho the weak-convexity modulus of the penalty,
gamma = s/sigma and eta = rho/sigma.  The rate calculators bound the raw
(unrelaxed) double-reflection operators produced by
``solver.double_reflection``; relaxed iterations inherit the bounds through
averaging but are not rated here.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BoundInapplicableError, StepSizeError


def reflection_bound_smooth(alpha: float, lo: float, hi: float) -> float:
    """Lipschitz bound of 2*prox_f - I when f has curvature in [lo, hi].

    Equals max(|1 - a*hi|/(1 + a*hi), |1 - a*lo|/(1 + a*lo)); at lo = 0 the
    bound degrades to 1 (mere nonexpansiveness).
    """
    if alpha <= 0:
        raise StepSizeError(f"alpha must be positive, got {alpha}")
    if not 0 <= lo <= hi:
        raise ValueError(f"need 0 <= lo <= hi, got lo={lo}, hi={hi}")
    top = abs(1.0 - alpha * hi) / (1.0 + alpha * hi)
    bottom = abs(1.0 - alpha * lo) / (1.0 + alpha * lo)
    return max(top, bottom)


def reflection_bound_weak(alpha: float, rho: float) -> float:
    """Lipschitz bound (1 + a*rho)/(1 - a*rho) of 2*prox_g - I for a
    rho-weakly convex g; requires alpha * rho < 1."""
    if alpha <= 0:
        raise StepSizeError(f"alpha must be positive, got {alpha}")
    if rho < 0:
        raise ValueError(f"rho must be nonnegative, got {rho}")
    if alpha * rho >= 1.0:
        raise StepSizeError(f"alpha * rho = {alpha * rho:.6g} >= 1: bound diverges")
    return (1.0 + alpha * rho) / (1.0 - alpha * rho)


def contraction_rate_main(alpha: float, s: float, rho: float, sigma: float | None = None) -> float:
    """Contraction factor of the direct double reflection.

    ((1 - a^2 s rho) - a(s - rho)) / ((1 - a^2 s rho) + a(s - rho)), valid
    for alpha <= 1/sqrt(sigma*s) (checked when sigma is given) and rho < s.
    """
    if alpha <= 0:
        raise StepSizeError(f"alpha must be positive, got {alpha}")
    if not 0 <= rho < s:
        raise BoundInapplicableError(f"need 0 <= rho < s, got rho={rho}, s={s}")
    if sigma is not None:
        if sigma < s:
            raise ValueError(f"need sigma >= s, got sigma={sigma}, s={s}")
        if alpha > 1.0 / math.sqrt(sigma * s) * (1 + 1e-12):
            raise BoundInapplicableError(
                f"alpha = {alpha:.6g} exceeds 1/sqrt(sigma*s) = {1.0 / math.sqrt(sigma * s):.6g}"
            )
    quad = 1.0 - alpha * alpha * s * rho
    lin = alpha * (s - rho)
    if quad - lin < -1e-12 * (abs(quad) + lin):
        raise BoundInapplicableError(
            f"alpha = {alpha:.6g} outside the contraction regime for s={s}, rho={rho}"
        )
    return max((quad - lin) / (quad + lin), 0.0)


def contraction_rate_shift(alpha: float, s: float, rho: float, sigma: float) -> float:
    """Contraction factor of the shifted double reflection.

    max(|1 - a(sigma - rho)|/(1 + a(sigma - rho)),
        (1 - a(s - rho))/(1 + a(s - rho))), valid for alpha <= 1/s, rho < s.
    """
    if alpha <= 0:
        raise StepSizeError(f"alpha must be positive, got {alpha}")
    if not 0 <= rho < s <= sigma:
        raise BoundInapplicableError(f"need 0 <= rho < s <= sigma, got rho={rho}, s={s}, sigma={sigma}")
    if alpha > (1.0 / s) * (1 + 1e-12):
        raise BoundInapplicableError(f"alpha = {alpha:.6g} exceeds 1/s = {1.0 / s:.6g}")
    wide = abs(1.0 - alpha * (sigma - rho)) / (1.0 + alpha * (sigma - rho))
    narrow = (1.0 - alpha * (s - rho)) / (1.0 + alpha * (s - rho))
    return max(wide, narrow)


def min_rate_main(gamma: float, eta: float) -> float:
    """contraction_rate_main at its largest admissible step a = 1/sqrt(sigma*s),
    written in the ratios gamma = s/sigma, eta = rho/sigma:

        ((1 - eta) sqrt(gamma) - (gamma - eta)) /
        ((1 - eta) sqrt(gamma) + (gamma - eta)).
    """
    if not 0 <= eta < gamma <= 1:
        raise BoundInapplicableError(f"need 0 <= eta < gamma <= 1, got gamma={gamma}, eta={eta}")
    root = math.sqrt(gamma)
    num = (1.0 - eta) * root - (gamma - eta)
    den = (1.0 - eta) * root + (gamma - eta)
    return num / den


def shift_rate_floor(eta: float) -> float:
    """Lower bound eta / (2 - eta) on the shifted rate at a = 1/s; independent
    of the conditioning of the smooth term."""
    if not 0 <= eta <= 1:
        raise BoundInapplicableError(f"need 0 <= eta <= 1, got {eta}")
    return eta / (2.0 - eta)


def empirical_lipschitz(operator, sampler, n_pairs: int, seed: int = 0) -> float:
    """Largest sampled ratio ||Op(x) - Op(y)|| / ||x - y|| over n_pairs draws.

    ``sampler(rng)`` must return a point of the operator's domain; pairs
    closer than 1e-12 are skipped.
    """
    if n_pairs < 1:
        raise ValueError(f"n_pairs must be >= 1, got {n_pairs}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    usable = 0
    for _ in range(n_pairs):
        x = np.asarray(sampler(rng), dtype=float)
        y = np.asarray(sampler(rng), dtype=float)
        gap = float(np.linalg.norm(x - y))
        if gap < 1e-12:
            continue
        usable += 1
        ratio = float(np.linalg.norm(np.asarray(operator(x)) - np.asarray(operator(y)))) / gap
        worst = max(worst, ratio)
    if usable == 0:
        raise ValueError("degenerate sampler: all sampled pairs coincide")
    return worst


def rate_table(s: float, sigma: float, rho: float, alphas) -> list[dict]:
    """Rows of {alpha, main_rate, shift_rate} over an alpha grid; rates are
    None where the corresponding formula does not apply."""
    rows = []
    for alpha in alphas:
        try:
            main = contraction_rate_main(alpha, s, rho, sigma)
        except (BoundInapplicableError, StepSizeError):
            main = None
        try:
            shift = contraction_rate_shift(alpha, s, rho, sigma)
        except (BoundInapplicableError, StepSizeError):
            shift = None
        rows.append({"alpha": float(alpha), "main_rate": main, "shift_rate": shift})
    return rows


def write_rate_table_csv(path, rows) -> None:
    def fmt(v):
        return "" if v is None else f"{v:.17g}"

    with open(path, "w") as fh:
        fh.write("alpha,main_rate,shift_rate\n")
        for row in rows:
            fh.write(f"{row['alpha']:.17g},{fmt(row['main_rate'])},{fmt(row['shift_rate'])}\n")
