"""
Fairness Metrics & SIMin-vs-SMax Monte Carlo
============================================
Compares two ways of choosing among candidate vectors of positive terms:

    SMax  - maximize sum_i x_i
    SIMin - minimize sum_i 1/x_i

and counts how often the SIMin choice is at least as fair as the SMax choice.
Each trial draws its own candidate set from a generator keyed by
(seed, trial index), so trials are independent and reproducible in any order.

Metrics are plug-ins: ``register_metric(name, fn)``. Larger values mean fairer.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING, Any, Callable, Dict, Iterable, NamedTuple

import numpy as np

from sieeopt.errors import InvalidParameterError

if TYPE_CHECKING:
    import numpy.typing as npt

logger = logging.getLogger(__name__)

MetricFn = Callable[["npt.NDArray[np.float64]"], float]

# Metric values closer than this are treated as equal.
TIE_TOL = 1e-12


def _positive(x: Any) -> npt.NDArray[np.float64]:
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if arr.size == 0 or np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise InvalidParameterError("Fairness metrics need a non-empty vector of positive finite values")
    return arr


def jains_index(x: Any) -> float:
    """(sum x)^2 / (n sum x^2), in [1/n, 1]."""
    x = _positive(x)
    return float((x.sum() ** 2) / (len(x) * (x**2).sum()))


def max_min_ratio(x: Any) -> float:
    """max(x)/min(x) >= 1."""
    x = _positive(x)
    return float(x.max() / x.min())


def max_min_inverse(x: Any) -> float:
    """min(x)/max(x), the reciprocal of ``max_min_ratio``."""
    x = _positive(x)
    return float(x.min() / x.max())


def am_hm_gap(x: float, y: float) -> float:
    """Arithmetic mean minus harmonic mean of two positive numbers (>= 0)."""
    if x <= 0.0 or y <= 0.0:
        raise InvalidParameterError("AM-HM gap needs positive arguments")
    return 0.5 * (x + y) - 2.0 / (1.0 / x + 1.0 / y)


_METRICS: Dict[str, MetricFn] = {
    "jain": jains_index,
    "maxmin_inverse": max_min_inverse,
}


def register_metric(name: str, fn: MetricFn) -> None:
    """Adds a fairness metric. Larger values must mean fairer."""
    if name in _METRICS:
        raise InvalidParameterError(f"Fairness metric '{name}' is already registered")
    _METRICS[name] = fn


def get_metric(name: str) -> MetricFn:
    try:
        return _METRICS[name]
    except KeyError:
        raise InvalidParameterError(f"Unknown fairness metric '{name}', known: {sorted(_METRICS)}") from None


def available_metrics() -> list[str]:
    return sorted(_METRICS)


class Picks(NamedTuple):
    smax: npt.NDArray[np.float64]
    simin: npt.NDArray[np.float64]


def _pick_indices(candidates: npt.NDArray[np.float64]) -> tuple[int, int]:
    # np.argmax/argmin return the first index on ties
    smax = int(np.argmax(candidates.sum(axis=1)))
    simin = int(np.argmin((1.0 / candidates).sum(axis=1)))
    return smax, simin


def simin_smax_compare(candidates: Any) -> Picks:
    """
    Picks the SMax and SIMin candidates from a set of positive vectors.

    Args:
        candidates: Array-like of shape (n_candidates, n_terms).

    Raises:
        InvalidParameterError: Empty set or nonpositive entry.
    """
    cands = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    if cands.shape[0] == 0 or cands.shape[1] == 0:
        raise InvalidParameterError("Candidate set is empty")
    if np.any(cands <= 0.0):
        raise InvalidParameterError("Candidates must be strictly positive")
    smax, simin = _pick_indices(cands)
    return Picks(smax=cands[smax].copy(), simin=cands[simin].copy())


@dataclass
class FairnessTrialConfig:
    n_terms: int = 2
    range_max: float = 5.0
    n_candidates: int = 64
    n_trials: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_terms < 2:
            raise InvalidParameterError(f"n_terms must be >= 2, got {self.n_terms}")
        if not self.range_max > 1.0:
            raise InvalidParameterError(f"range_max must exceed 1, got {self.range_max}")
        if self.n_candidates < 1 or self.n_trials < 1:
            raise InvalidParameterError("n_candidates and n_trials must be positive")
        if self.seed < 0:
            raise InvalidParameterError("seed must be unsigned")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def trial_candidates(cfg: FairnessTrialConfig, trial: int) -> npt.NDArray[np.float64]:
    """Candidate set of one trial, drawn uniformly on [1, range_max]."""
    rng = np.random.default_rng([cfg.seed, trial])
    return rng.uniform(1.0, cfg.range_max, size=(cfg.n_candidates, cfg.n_terms))


def fairness_experiment(cfg: FairnessTrialConfig, metric: str = "jain") -> float:
    """
    Percentage of trials in which the SIMin pick is at least as fair as the
    SMax pick under ``metric``.
    """
    metric_fn = get_metric(metric)
    better = 0
    for trial in range(cfg.n_trials):
        cands = trial_candidates(cfg, trial)
        smax, simin = _pick_indices(cands)
        if metric_fn(cands[simin]) >= metric_fn(cands[smax]) - TIE_TOL:
            better += 1
    percentage = 100.0 * better / cfg.n_trials
    logger.debug(
        f"Fairness n_terms={cfg.n_terms} range={cfg.range_max} metric={metric}: {percentage:.2f}%"
    )
    return percentage


@dataclass
class FairnessPoint:
    metric: str
    range_max: float
    n_terms: int
    percentage: float


def fairness_sweep(
    terms: Iterable[int],
    ranges: Iterable[float],
    metric: str = "jain",
    *,
    n_candidates: int = 64,
    n_trials: int = 10_000,
    seed: int = 0,
) -> list[FairnessPoint]:
    """Percentage versus number of terms, for every range."""
    terms = list(terms)
    points: list[FairnessPoint] = []
    for range_max in ranges:
        for n_terms in terms:
            cfg = FairnessTrialConfig(
                n_terms=n_terms,
                range_max=range_max,
                n_candidates=n_candidates,
                n_trials=n_trials,
                seed=seed,
            )
            points.append(FairnessPoint(metric, float(range_max), n_terms, fairness_experiment(cfg, metric)))
    return points
