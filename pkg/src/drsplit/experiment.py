"""Sparse-deconvolution benchmark: instance generation and experiment runners.

An instance observes y = H x + u where H is a tall full-convolution matrix
built from a geometric filter tuned to a target Gram condition ratio
sigma/s, x is sparse, and u is white Gaussian noise at a prescribed SNR.
The penalty weight follows tau = 3 * rho * std(u) with rho a fixed fraction
of the strong convexity s.

Two stock configurations are provided: ``EXP1`` (ratio 15.96, rho = s) and
``EXP2`` (ratio 5.44, rho = s/2).  ``run_experiment`` solves every seeded
instance with an ISTA reference (10k iterations) plus the configured DR
variants at 0.99x their step bounds and reports iterations-to-threshold of
the distance to the reference minimizer.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import statistics
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import DivergenceError, FilterDesignError
from .linalg import LinearMap, convolution_matrix
from .penalty import FirmPenalty, QuadraticPlusPenalty, SeparablePenalty
from .smooth import QuadraticTerm, SubspaceConstraint, support_mask
from .solver import Problem, SolverConfig, run, step_bound

logger = logging.getLogger(__name__)


def generate_sparse_signal(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-sparse signal: uniform support, signed amplitudes in [1, 2]."""
    if k < 0 or k > n:
        raise ValueError(f"sparsity k must lie in [0, {n}], got {k}")
    x = np.zeros(n)
    if k == 0:
        return x
    positions = rng.choice(n, size=k, replace=False)
    signs = rng.choice([-1.0, 1.0], size=k)
    x[positions] = signs * rng.uniform(1.0, 2.0, size=k)
    return x


def add_noise_snr(clean, snr_db: float, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Add white Gaussian noise with std set so that
    10*log10(mean(clean^2)/var(u)) = snr_db.  Returns (noisy, std)."""
    clean = np.asarray(clean, dtype=float)
    power = float(np.mean(clean**2))
    if power == 0.0:
        raise ValueError("clean signal is identically zero; SNR undefined")
    std = math.sqrt(power / 10.0 ** (snr_db / 10.0))
    return clean + rng.normal(0.0, std, size=clean.size), std


def _condition_ratio(a: float, length: int, signal_len: int) -> float:
    taps = a ** np.arange(length)
    s, sigma = LinearMap(convolution_matrix(taps, signal_len)).gram_extremes()
    return sigma / s


@lru_cache(maxsize=None)
def _design_filter_cached(target_ratio: float, length: int, signal_len: int, tol: float):
    lo, hi = 1e-4, 0.95
    r_lo = _condition_ratio(lo, length, signal_len)
    r_hi = _condition_ratio(hi, length, signal_len)
    if not r_lo <= target_ratio <= r_hi:
        raise FilterDesignError(
            f"target ratio {target_ratio:.6g} outside achievable range "
            f"[{r_lo:.6g}, {r_hi:.6g}] for length-{length} filters"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r = _condition_ratio(mid, length, signal_len)
        if abs(r - target_ratio) <= tol * target_ratio:
            return tuple(mid ** np.arange(length))
        if r < target_ratio:
            lo = mid
        else:
            hi = mid
    raise FilterDesignError(f"bisection failed to reach ratio {target_ratio:.6g} within tolerance {tol}")


def design_filter(target_ratio: float, length: int = 31, signal_len: int = 90, tol: float = 0.02) -> np.ndarray:
    """Geometric filter (1, a, a^2, ...) with a bisected so the Gram condition
    ratio of the induced tall convolution matrix matches target_ratio."""
    if target_ratio <= 1.0:
        raise ValueError(f"target_ratio must exceed 1, got {target_ratio}")
    return np.array(_design_filter_cached(float(target_ratio), int(length), int(signal_len), float(tol)))


@dataclass(frozen=True)
class ExperimentSpec:
    """Recipe for one benchmark family."""

    target_ratio: float
    rho_rule: float                      # rho = rho_rule * s
    sparsity: int = 9
    n_seeds: int = 20
    variants: tuple[str, ...] = ("dr-main-fg", "dr-shift-fg")
    alpha_fraction: float = 0.99
    signal_len: int = 90
    filter_len: int = 31
    snr_db: float = 10.0
    relaxation: float = 0.5
    max_iters: int = 5000
    dist_threshold: float = 1e-6
    ratio_tol: float = 0.02
    reference_iters: int = 10000


EXP1 = ExperimentSpec(target_ratio=15.96, rho_rule=1.0)
EXP2 = ExperimentSpec(target_ratio=5.44, rho_rule=0.5)


@dataclass(frozen=True)
class ProblemInstance:
    """One deconvolution instance; serializes to JSON losslessly."""

    operator: LinearMap
    filter_taps: tuple[float, ...]
    ground_truth: np.ndarray
    y: np.ndarray
    noise_std: float
    penalty: FirmPenalty
    seed: int

    def problem(self) -> Problem:
        return Problem(QuadraticTerm(self.operator, self.y), self.penalty)

    def condition_ratio(self) -> float:
        s, sigma = self.operator.gram_extremes()
        return sigma / s

    def to_json_dict(self) -> dict:
        return {
            "filter": [float(t) for t in self.filter_taps],
            "signal": [float(v) for v in self.ground_truth],
            "y": [float(v) for v in self.y],
            "noise_std": self.noise_std,
            "seed": self.seed,
            "penalty": {"tau": self.penalty.tau, "rho": self.penalty.rho},
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def from_json_dict(cls, data: dict) -> "ProblemInstance":
        taps = tuple(float(t) for t in data["filter"])
        signal = np.asarray(data["signal"], dtype=float)
        return cls(
            operator=LinearMap(convolution_matrix(taps, signal.size)),
            filter_taps=taps,
            ground_truth=signal,
            y=np.asarray(data["y"], dtype=float),
            noise_std=float(data["noise_std"]),
            penalty=FirmPenalty(float(data["penalty"]["tau"]), float(data["penalty"]["rho"])),
            seed=int(data["seed"]),
        )

    @classmethod
    def load(cls, path) -> "ProblemInstance":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def build_instance(spec: ExperimentSpec, seed: int) -> ProblemInstance:
    """Assemble one seeded instance of the experiment recipe (deterministic in seed)."""
    taps = design_filter(spec.target_ratio, spec.filter_len, spec.signal_len, spec.ratio_tol)
    operator = LinearMap(convolution_matrix(taps, spec.signal_len))
    s, _ = operator.gram_extremes()
    rng = np.random.default_rng(seed)
    x = generate_sparse_signal(spec.signal_len, spec.sparsity, rng)
    clean = operator.apply(x)
    y, std = add_noise_snr(clean, spec.snr_db, rng)
    rho = spec.rho_rule * s
    tau = 3.0 * rho * std
    return ProblemInstance(
        operator=operator,
        filter_taps=tuple(float(t) for t in taps),
        ground_truth=x,
        y=y,
        noise_std=std,
        penalty=FirmPenalty(tau, rho),
        seed=seed,
    )


def build_subspace_demo(y, support, penalty: SeparablePenalty) -> tuple[Problem, np.ndarray]:
    """Constrained problem min 0.5||y - x||^2 + i_K(x) + phi(x) split for the
    shifted variants as f = i_K, g = 0.5||y - x||^2 + phi.

    Returns the problem together with its separable closed-form solution:
    the unit-step prox of phi applied to y on the support, zero elsewhere
    (requires phi.modulus < 1).
    """
    y = np.asarray(y, dtype=float)
    prob = Problem(SubspaceConstraint(y.size, support), QuadraticPlusPenalty(y, penalty))
    mask = support_mask(y.size, support)
    oracle = np.where(mask, penalty.prox(y, 1.0), 0.0)
    return prob, oracle


def derive_seeds(master_seed: int, n: int) -> list[int]:
    """n per-instance integer seeds derived deterministically from the master seed."""
    return [int(v) for v in np.random.SeedSequence(master_seed).generate_state(n)]


def _as_inf(v) -> float:
    return math.inf if v is None else float(v)


@dataclass(frozen=True)
class SeedResult:
    seed: int
    iterations_to_threshold: dict
    final_cost: dict
    final_dist: dict
    failed: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "iterations_to_threshold": self.iterations_to_threshold,
            "final_cost": self.final_cost,
            "final_dist": self.final_dist,
            "failed": self.failed,
        }


@dataclass(frozen=True)
class ExperimentReport:
    spec: ExperimentSpec
    master_seed: int
    achieved_ratio: float
    results: tuple[SeedResult, ...]

    def ok_results(self) -> list[SeedResult]:
        return [r for r in self.results if r.failed is None]

    def median_iterations(self) -> dict:
        out = {}
        names = set()
        for r in self.ok_results():
            names.update(r.iterations_to_threshold)
        for name in sorted(names):
            reached = [
                r.iterations_to_threshold[name]
                for r in self.ok_results()
                if r.iterations_to_threshold.get(name) is not None
            ]
            out[name] = statistics.median(reached) if reached else None
        return out

    def count_first_faster(self, first: str = "dr-main-fg", second: str = "dr-shift-fg") -> tuple[int, int]:
        """(#seeds where `first` hits the threshold strictly earlier, #seeds compared)."""
        wins = total = 0
        for r in self.ok_results():
            it = r.iterations_to_threshold
            if first in it and second in it:
                total += 1
                wins += _as_inf(it[first]) < _as_inf(it[second])
        return wins, total

    def dr_beats_ista_every_seed(self) -> bool:
        ok = self.ok_results()
        if not ok:
            return False
        for r in ok:
            ista = _as_inf(r.iterations_to_threshold.get("ista"))
            for name, iters in r.iterations_to_threshold.items():
                if name != "ista" and not _as_inf(iters) < ista:
                    return False
        return True

    def to_json_dict(self) -> dict:
        wins, total = self.count_first_faster()
        return {
            "spec": dataclasses.asdict(self.spec),
            "master_seed": self.master_seed,
            "achieved_ratio": self.achieved_ratio,
            "seeds": [r.to_json_dict() for r in self.results],
            "aggregate": {
                "median_iterations_to_threshold": self.median_iterations(),
                "main_faster_count": wins,
                "seeds_compared": total,
                "dr_beats_ista_every_seed": self.dr_beats_ista_every_seed(),
            },
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)


def run_experiment(spec: ExperimentSpec, master_seed: int = 0, out_dir=None) -> ExperimentReport:
    """Run every seeded instance of the experiment recipe and aggregate the results.

    Per seed: build the instance, compute the ISTA reference minimizer, then
    run ISTA and the configured DR variants (at alpha_fraction x their step
    bounds) against it, recording iterations until the distance to the
    reference drops below spec.dist_threshold.  A diverging solver aborts the
    seed with a logged diagnostic; remaining seeds still run.  When out_dir
    is given, instances, per-variant trace CSVs, and the aggregate report are
    written there.
    """
    out_path = None
    if out_dir is not None:
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)

    results = []
    achieved = math.nan
    for idx, seed in enumerate(derive_seeds(master_seed, spec.n_seeds)):
        instance = build_instance(spec, seed)
        problem = instance.problem()
        s, sigma = instance.operator.gram_extremes()
        achieved = sigma / s
        traces = {}
        try:
            reference = run(problem, SolverConfig("ista", max_iters=spec.reference_iters))
            x_ref = reference.final_x
            traces["ista"] = run(
                problem,
                SolverConfig("ista", max_iters=spec.reference_iters, record_reference=x_ref),
            )
            for variant in spec.variants:
                bound = step_bound(variant, sigma, problem.rho)
                alpha = spec.alpha_fraction * bound if math.isfinite(bound) else None
                traces[variant] = run(
                    problem,
                    SolverConfig(
                        variant,
                        alpha=alpha,
                        relaxation=spec.relaxation,
                        max_iters=spec.max_iters,
                        record_reference=x_ref,
                    ),
                )
        except DivergenceError as exc:
            logger.warning("seed %d aborted: %s", seed, exc)
            results.append(
                SeedResult(seed=seed, iterations_to_threshold={}, final_cost={}, final_dist={}, failed=str(exc))
            )
            continue

        results.append(
            SeedResult(
                seed=seed,
                iterations_to_threshold={k: t.iterations_to(spec.dist_threshold) for k, t in traces.items()},
                final_cost={k: t.final_cost for k, t in traces.items()},
                final_dist={k: float(t.dist_to_ref[-1]) for k, t in traces.items()},
            )
        )
        if out_path is not None:
            seed_dir = out_path / f"seed_{idx:03d}"
            seed_dir.mkdir(exist_ok=True)
            instance.save(seed_dir / "instance.json")
            for name, trace in traces.items():
                trace.to_csv(seed_dir / f"{name}.csv")

    report = ExperimentReport(
        spec=spec, master_seed=master_seed, achieved_ratio=achieved, results=tuple(results)
    )
    if out_path is not None:
        report.save(out_path / "report.json")
    return report
