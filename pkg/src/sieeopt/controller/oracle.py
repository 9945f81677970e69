"""
Exhaustive grid search over the power box, used as desk-scale ground truth
and as the rate-maximization baseline.
"""
from __future__ import annotations

import logging
from enum import StrEnum
from typing import TYPE_CHECKING

import numpy as np

from sieeopt.errors import InstanceTooLargeError, InvalidParameterError
from sieeopt.model.system import LN2, SystemParams, per_user_iee, siee_objective
from sieeopt.controller.solver import SolveReport, SolveStatus

if TYPE_CHECKING:
    import numpy.typing as npt

logger = logging.getLogger(__name__)

MAX_GRID_BS = 4


class GridObjective(StrEnum):
    SIEE = "siee"
    SUMRATE = "sumrate"


def _batch_rates(params: SystemParams, powers: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Rates for a batch of allocations, one per row."""
    direct = params.direct_gains
    interference = powers @ params.gains - powers * direct + params.noise_power
    return np.log1p(direct * powers / interference) / LN2


def _batch_values(
    params: SystemParams, powers: npt.NDArray[np.float64], objective: GridObjective
) -> npt.NDArray[np.float64]:
    """Values to minimize (sum rate is negated)."""
    a = _batch_rates(params, powers)
    if objective is GridObjective.SUMRATE:
        return -a.sum(axis=1)
    b = powers * params.phi + params.circuit_power
    return (b / a).sum(axis=1)


def grid_oracle(
    params: SystemParams,
    resolution: int,
    objective: GridObjective | str = GridObjective.SIEE,
) -> tuple[npt.NDArray[np.float64], float]:
    """
    Best point of the uniform grid over prod_i [P_i/resolution, P_i].

    The floor keeps every rate positive for both objectives.

    Args:
        params: Instance with at most ``MAX_GRID_BS`` BSs.
        resolution: Points per axis, >= 2.
        objective: "siee" (minimized) or "sumrate" (maximized).

    Returns:
        (p, value) where value is the objective at p (SIEE or sum rate).

    Raises:
        InstanceTooLargeError: More than ``MAX_GRID_BS`` BSs.
    """
    objective = GridObjective(objective)
    if params.n_bs > MAX_GRID_BS:
        raise InstanceTooLargeError(f"Grid search supports I <= {MAX_GRID_BS}, got {params.n_bs}")
    if resolution < 2:
        raise InvalidParameterError(f"Grid resolution must be >= 2, got {resolution}")

    axes = [np.linspace(cap / resolution, cap, resolution) for cap in params.p_max]
    # All axes but the first are enumerated at once; the first is looped over.
    if params.n_bs > 1:
        rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, params.n_bs - 1)
    else:
        rest = np.empty((1, 0))

    best_value = np.inf
    best_p = np.empty(params.n_bs)
    for first in axes[0]:
        powers = np.column_stack([np.full(rest.shape[0], first), rest])
        values = _batch_values(params, powers, objective)
        k = int(np.argmin(values))
        if values[k] < best_value:
            best_value = float(values[k])
            best_p = powers[k].copy()

    value = -best_value if objective is GridObjective.SUMRATE else best_value
    logger.debug(f"Grid oracle ({objective.value}, resolution={resolution}): {value:.6e} at {best_p}")
    return best_p, value


def sum_rate_max_baseline(params: SystemParams, resolution: int = 64) -> SolveReport:
    """Grid-searched sum-rate maximizer, reported like a SIEE solve."""
    p, _ = grid_oracle(params, resolution, GridObjective.SUMRATE)
    return SolveReport(
        p_star=p,
        objective_trajectory=[siee_objective(params, p)],
        per_user_iee=per_user_iee(params, p),
        status=SolveStatus.CONVERGED,
    )
