"""
SIEE Solver
===========
Alternate convex search over the auxiliaries (t, y) and the powers:

    1. start at p = P_max/2 with (t, y) tight there,
    2. run the ADMM inner loop on the fixed-(t, y) surrogate until ||p - q||
       is small,
    3. refresh t from (Ahat(p, y), B(p)) and repeat until t settles.

Each outer iterate is accepted only if it does not increase F1, so the
objective trajectory is non-increasing even when the inner loop stops early.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING, Any, Dict, Optional

import numpy as np

from sieeopt.errors import InvalidOperatingPointError, InvalidParameterError, SurrogateDomainError
from sieeopt.model.system import (
    SystemParams,
    as_power_allocation,
    per_user_iee,
    power_consumptions,
    siee_objective,
    surrogate_rates,
)
from sieeopt.controller.admm import (
    AdmmState,
    NewtonConfig,
    admm_inner_loop,
    default_theta,
    penalty_term,
)
from sieeopt.controller.fairness import jains_index, max_min_ratio
from sieeopt.controller.transform import (
    TransformState,
    YUpdatePolicy,
    surrogate_objective_f3,
    update_t,
    update_y,
)

if TYPE_CHECKING:
    import numpy.typing as npt

logger = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    """
    Attributes:
        delta1: Inner stop tolerance, relative to max(P_max). None means
            1e-4 * sqrt(I).
        delta2: Outer stop tolerance on the relative change of t.
        theta_scale: Multiplier of the curvature-matched penalty.
        y_update: Where y is refreshed (inner ADMM loop or outer loop).
        seed: Recorded in manifests; instance generation draws from it.
    """
    delta1: Optional[float] = None
    delta2: float = 1e-5
    max_outer: int = 200
    max_inner: int = 500
    theta_scale: float = 200.0
    y_update: YUpdatePolicy = YUpdatePolicy.INNER
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    seed: int = 0

    def __post_init__(self) -> None:
        self.y_update = YUpdatePolicy(self.y_update)
        if self.delta1 is not None and self.delta1 <= 0.0:
            raise InvalidParameterError(f"delta1 must be positive, got {self.delta1}")
        if self.delta2 <= 0.0 or self.theta_scale <= 0.0:
            raise InvalidParameterError("delta2 and theta_scale must be positive")
        if self.max_outer < 1 or self.max_inner < 1:
            raise InvalidParameterError("Iteration caps must be >= 1")
        if self.seed < 0:
            raise InvalidParameterError("seed must be unsigned")

    def resolved_delta1(self, n_bs: int) -> float:
        return self.delta1 if self.delta1 is not None else 1e-4 * math.sqrt(n_bs)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["y_update"] = self.y_update.value
        return data

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> SolverConfig:
        data = dict(data)
        if "newton" in data:
            data["newton"] = NewtonConfig.from_dict(data["newton"])
        return SolverConfig(**data)


class SolveStatus(StrEnum):
    CONVERGED = "converged"
    ITERATION_CAP = "iteration-cap"
    ERROR = "error"


@dataclass
class SolveReport:
    p_star: npt.NDArray[np.float64]
    objective_trajectory: list[float]
    per_user_iee: npt.NDArray[np.float64]
    inner_iterations: list[int] = field(default_factory=list)
    residual_trace: list[float] = field(default_factory=list)
    penalty_ratio: float = math.nan
    status: SolveStatus = SolveStatus.CONVERGED
    t_trajectory: list[npt.NDArray[np.float64]] = field(default_factory=list)
    newton_iterations: list[int] = field(default_factory=list)
    theta: float = math.nan
    outer_iterations: int = 0
    rejected_step: bool = False

    @property
    def objective(self) -> float:
        return self.objective_trajectory[-1]

    def to_rows(self) -> list[Dict[str, Any]]:
        """One row per user: power and inverse energy efficiency."""
        return [
            {"user": i, "p_w": float(p), "iee": float(iee)}
            for i, (p, iee) in enumerate(zip(self.p_star, self.per_user_iee))
        ]

    def trajectory_rows(self) -> list[Dict[str, Any]]:
        """One row per outer iteration (0 is the start point)."""
        inner = [0] + list(self.inner_iterations)
        return [
            {"outer_iter": n, "objective": float(f), "inner_iterations": inner[n] if n < len(inner) else 0}
            for n, f in enumerate(self.objective_trajectory)
        ]


@dataclass
class AllocationSummary:
    sum_iee: float
    max_min_iee_ratio: float
    ee_jain_index: float


def allocation_summary(params: SystemParams, p: Any) -> AllocationSummary:
    """Sum IEE, max/min IEE ratio and Jain's index of the per-user EE."""
    iee = per_user_iee(params, p)
    return AllocationSummary(
        sum_iee=float(iee.sum()),
        max_min_iee_ratio=max_min_ratio(iee),
        ee_jain_index=jains_index(1.0 / iee),
    )


def solve_siee(
    params: SystemParams,
    cfg: Optional[SolverConfig] = None,
    p_init: Any = None,
) -> SolveReport:
    """
    Minimizes the sum of inverse energy efficiencies.

    Args:
        params: Problem instance.
        cfg: Solver settings, defaults to ``SolverConfig()``.
        p_init: Strictly positive feasible start, defaults to P_max/2.

    Returns:
        SolveReport with a feasible p_star and F1(p_star) <= F1(p_init).

    Raises:
        InvalidOperatingPointError: p_init has a zero entry.
        ZeroRateError, NewtonDivergedError, SingularJacobianError: Propagated.
    """
    cfg = cfg or SolverConfig()
    p = as_power_allocation(params, params.p_max / 2.0 if p_init is None else p_init).copy()
    if np.any(p <= 0.0):
        raise InvalidOperatingPointError("p_init must be strictly positive")

    n_bs = params.n_bs
    delta1 = cfg.resolved_delta1(n_bs)
    refresh_y = cfg.y_update is YUpdatePolicy.INNER

    state = TransformState.initial(params, p)
    admm = AdmmState(p=p, q=p.copy(), u=np.zeros(n_bs), theta=default_theta(params, state.t, p, cfg.theta_scale))
    objective = siee_objective(params, p)
    report = SolveReport(
        p_star=p,
        objective_trajectory=[objective],
        per_user_iee=per_user_iee(params, p),
        status=SolveStatus.ITERATION_CAP,
        t_trajectory=[state.t.copy()],
    )
    logger.info(f"Solving SIEE for I={n_bs}: F1(p_init) = {objective:.6e}")

    for n in range(1, cfg.max_outer + 1):
        admm.rescale_theta(default_theta(params, state.t, p, cfg.theta_scale))
        if not refresh_y:
            state.y = update_y(params, p)

        inner = admm_inner_loop(
            params,
            state,
            admm,
            delta1=delta1,
            max_inner=cfg.max_inner,
            newton=cfg.newton,
            refresh_y=refresh_y,
        )
        report.outer_iterations = n

        candidate = admm.p.copy()
        candidate_objective = siee_objective(params, candidate)
        if candidate_objective > objective:
            logger.warning(
                f"Outer iteration {n} would raise F1 ({candidate_objective:.6e} > {objective:.6e}); "
                f"keeping the previous iterate"
            )
            report.rejected_step = True
            report.status = SolveStatus.CONVERGED
            break

        _, ahat = surrogate_rates(params, candidate, state.y)
        if np.any(ahat <= 0.0):
            raise SurrogateDomainError(f"Surrogate rate is not positive at outer iterate {n}")
        t_new = update_t(ahat, power_consumptions(params, candidate))
        t_change = float(np.max(np.abs(t_new - state.t)) / np.max(np.abs(state.t)))

        penalty = penalty_term(admm.p, admm.q, admm.u, admm.theta)
        surrogate = surrogate_objective_f3(params, admm.p, admm.q, state)
        report.penalty_ratio = surrogate / penalty if penalty > 0.0 else math.inf
        report.inner_iterations.append(inner.iterations)
        report.residual_trace.extend(inner.residuals)
        report.newton_iterations.extend(inner.newton_iterations)

        p, objective = candidate, candidate_objective
        state.t = t_new
        report.objective_trajectory.append(objective)
        report.t_trajectory.append(t_new.copy())
        logger.debug(
            f"Outer {n}: F1 = {objective:.9e}, inner = {inner.iterations}, t-change = {t_change:.3e}"
        )
        if t_change < cfg.delta2:
            report.status = SolveStatus.CONVERGED
            break
    else:
        logger.warning(f"SIEE solve hit max_outer={cfg.max_outer}")

    report.p_star = p
    report.per_user_iee = per_user_iee(params, p)
    report.theta = admm.theta
    logger.info(
        f"SIEE solve {report.status.value} after {report.outer_iterations} outer iterations: "
        f"F1 = {report.objective:.6e}"
    )
    return report
