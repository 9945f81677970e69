"""
ADMM Splitting of the Fixed-(t, y) Subproblem
=============================================
With t and y frozen, F3 splits into a p-part (power consumption, separable,
box constrained) and a q-part (surrogate rates, coupled through interference).
The scaled-form ADMM iterates

    p <- argmin_p  sum t_i B_i(p)^2 + (theta/2) ||p - q + u||^2   over C_p
    q <- argmin_q  sum 1/(4 t_i Ahat_i(q)^2) + (theta/2) ||p - q + u||^2
    u <- u + p - q

The p-step is closed form. The q-step solves the stationarity system c(q) = 0
with a safeguarded Newton method. c is the negated gradient of the q-objective:

    c = G^T w + theta (p - q + u)

    G[j, i] = dg_j/dq_i       (y_j sqrt(h_jj/q_j) on the diagonal,
                               -y_j^2 h_{i,j} off it)
    w_j     = 1 / (ln4 t_j Ahat_j^3 g_j)

and its Jacobian is

    J = -G^T diag(s) G - diag(w_j y_j sqrt(h_jj) q_j^{-3/2} / 2) - theta I
    s_j = w_j (3/(ln2 Ahat_j g_j) + 1/g_j).
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Any, Dict, Optional

import numpy as np

from sieeopt.errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NewtonDivergedError,
    SingularJacobianError,
    SurrogateDomainError,
)
from sieeopt.model.system import LN2, SystemParams, power_consumptions, surrogate_gain_excess
from sieeopt.controller.transform import TransformState, surrogate_objective_f3, update_y

if TYPE_CHECKING:
    import numpy.typing as npt

logger = logging.getLogger(__name__)

LN4 = math.log(4.0)


@dataclass
class NewtonConfig:
    tol: float = 1e-8
    max_iter: int = 50
    damping_shrink: float = 0.5
    domain_eps: float = 1e-12
    g_floor: float = 1e-9
    max_backtracks: int = 60

    def __post_init__(self) -> None:
        if self.tol <= 0.0:
            raise InvalidParameterError(f"Newton tolerance must be positive, got {self.tol}")
        if self.max_iter < 1 or self.max_backtracks < 1:
            raise InvalidParameterError("Newton iteration and backtracking caps must be >= 1")
        if not 0.0 < self.damping_shrink < 1.0:
            raise InvalidParameterError(f"damping_shrink must lie in (0, 1), got {self.damping_shrink}")
        if self.domain_eps <= 0.0 or self.g_floor <= 0.0:
            raise InvalidParameterError("Domain floors must be positive")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> NewtonConfig:
        return NewtonConfig(**data)


@dataclass
class AdmmState:
    p: npt.NDArray[np.float64]
    q: npt.NDArray[np.float64]
    u: npt.NDArray[np.float64]
    theta: float
    iter: int = 0
    primal_residual_history: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.p = np.array(self.p, dtype=np.float64).reshape(-1)
        self.q = np.array(self.q, dtype=np.float64).reshape(-1)
        self.u = np.array(self.u, dtype=np.float64).reshape(-1)
        if not self.p.size == self.q.size == self.u.size:
            raise DimensionMismatchError("p, q and u must have the same length")
        if self.theta <= 0.0:
            raise InvalidParameterError(f"Penalty theta must be positive, got {self.theta}")

    def rescale_theta(self, theta: float) -> None:
        """Changes the penalty while keeping the unscaled dual theta*u fixed."""
        if theta <= 0.0:
            raise InvalidParameterError(f"Penalty theta must be positive, got {theta}")
        self.u = self.u * (self.theta / theta)
        self.theta = theta


@dataclass
class NewtonResult:
    q: npt.NDArray[np.float64]
    iterations: int
    damped_steps: int = 0
    fallback_steps: int = 0
    residual_norms: list[float] = field(default_factory=list)


@dataclass
class InnerLoopResult:
    converged: bool
    iterations: int
    residuals: list[float] = field(default_factory=list)
    dual_residuals: list[float] = field(default_factory=list)
    newton_iterations: list[int] = field(default_factory=list)


def _same_length(*vectors: npt.NDArray[np.float64]) -> None:
    if len({v.size for v in vectors}) != 1:
        raise DimensionMismatchError(f"Vector lengths differ: {[v.size for v in vectors]}")


# --- Closed-form and dual updates ---

def p_update(params: SystemParams, t: Any, q: Any, u: Any, theta: float) -> npt.NDArray[np.float64]:
    """
    Exact minimizer of t_i B_i(p_i)^2 + (theta/2)(p_i - q_i + u_i)^2 over [0, P_i].
    """
    t = params.check_vector(t, "t")
    q = params.check_vector(q, "q")
    u = params.check_vector(u, "u")
    phi, circuit = params.phi, params.circuit_power
    unclamped = (theta * (q - u) - 2.0 * t * phi * circuit) / (2.0 * t * phi**2 + theta)
    return np.clip(unclamped, 0.0, params.p_max)


def u_update(u: Any, p: Any, q: Any) -> npt.NDArray[np.float64]:
    u, p, q = (np.asarray(v, dtype=np.float64).reshape(-1) for v in (u, p, q))
    _same_length(u, p, q)
    return u + p - q


def primal_residual(p: Any, q: Any) -> float:
    """Euclidean consensus gap ||p - q||."""
    p, q = (np.asarray(v, dtype=np.float64).reshape(-1) for v in (p, q))
    _same_length(p, q)
    return float(np.linalg.norm(p - q))


def penalty_term(p: Any, q: Any, u: Any, theta: float) -> float:
    """(theta/2) ||p - q + u||^2."""
    p, q, u = (np.asarray(v, dtype=np.float64).reshape(-1) for v in (p, q, u))
    _same_length(p, q, u)
    return 0.5 * theta * float(np.sum((p - q + u) ** 2))


def augmented_lagrangian(
    params: SystemParams,
    p: Any,
    q: Any,
    u: Any,
    state: TransformState,
    theta: float,
) -> float:
    """Scaled-form augmented Lagrangian F3(p, q) + (theta/2)(||p - q + u||^2 - ||u||^2)."""
    u_arr = np.asarray(u, dtype=np.float64).reshape(-1)
    return (
        surrogate_objective_f3(params, p, q, state)
        + penalty_term(p, q, u_arr, theta)
        - 0.5 * theta * float(np.sum(u_arr**2))
    )


def default_theta(params: SystemParams, t: Any, p: Any, scale: float = 200.0) -> float:
    """
    Penalty matched to the p-subproblem curvature.

    theta = scale * sum(t^2 phi^2 B^2) / sum(t B^2): the curvatures t_i phi_i^2
    averaged with the weights t_i B_i^2 each user contributes to F3.
    """
    if scale <= 0.0:
        raise InvalidParameterError(f"Penalty scale must be positive, got {scale}")
    t = params.check_vector(t, "t")
    b = power_consumptions(params, p)
    weights = t * b**2
    return float(scale * np.sum(weights * t * params.phi**2) / np.sum(weights))


# --- q-subproblem ---

@dataclass(frozen=True)
class _QTerms:
    g: npt.NDArray[np.float64]
    ahat: npt.NDArray[np.float64]
    weights: npt.NDArray[np.float64]
    grad_g: npt.NDArray[np.float64]


def _q_terms(params: SystemParams, q: npt.NDArray[np.float64], y: Any, t: Any) -> _QTerms:
    y = params.check_vector(y, "y")
    t = params.check_vector(t, "t")
    if np.any(q <= 0.0):
        raise SurrogateDomainError(f"q-subproblem needs strictly positive powers, got {q}")
    excess = surrogate_gain_excess(params, q, y)
    g = 1.0 + excess
    if np.any(g <= 0.0):
        raise SurrogateDomainError("Surrogate argument g <= 0")
    ahat = np.log1p(excess) / LN2
    if np.any(ahat <= 0.0):
        raise SurrogateDomainError("Surrogate rate is not positive")

    weights = 1.0 / (LN4 * t * ahat**3 * g)
    grad_g = -(y**2)[:, None] * params.gains.T
    np.fill_diagonal(grad_g, y * np.sqrt(params.direct_gains / q))
    return _QTerms(g=g, ahat=ahat, weights=weights, grad_g=grad_g)


def q_objective(
    params: SystemParams, q: Any, y: Any, t: Any, theta: float, p: Any, u: Any
) -> float:
    """sum_i 1/(4 t_i Ahat_i(q)^2) + (theta/2) ||p - q + u||^2."""
    q = params.check_vector(q, "q")
    t = params.check_vector(t, "t")
    terms = _q_terms(params, q, y, t)
    return float(np.sum(1.0 / (4.0 * t * terms.ahat**2))) + penalty_term(p, q, u, theta)


def newton_residual(
    params: SystemParams, q: Any, y: Any, t: Any, theta: float, p: Any, u: Any
) -> npt.NDArray[np.float64]:
    """
    Stationarity residual c(q), the negated gradient of ``q_objective``.

    Raises:
        SurrogateDomainError: If q_i <= 0 or the surrogate rate is not positive.
    """
    q = params.check_vector(q, "q")
    p = params.check_vector(p, "p")
    u = params.check_vector(u, "u")
    terms = _q_terms(params, q, y, t)
    return terms.grad_g.T @ terms.weights + theta * (p - q + u)


def newton_jacobian(params: SystemParams, q: Any, y: Any, t: Any, theta: float) -> npt.NDArray[np.float64]:
    """Jacobian dc_i/dq_m of ``newton_residual``."""
    q = params.check_vector(q, "q")
    y = params.check_vector(y, "y")
    terms = _q_terms(params, q, y, t)
    w, g, G = terms.weights, terms.g, terms.grad_g
    s = w * (3.0 / (LN2 * terms.ahat * g) + 1.0 / g)
    jac = -(G.T * s) @ G
    jac[np.diag_indices_from(jac)] -= 0.5 * w * y * np.sqrt(params.direct_gains) * q**-1.5 + theta
    return jac


def _in_domain(params: SystemParams, q: npt.NDArray[np.float64], y: Any, cfg: NewtonConfig) -> bool:
    if not np.all(np.isfinite(q)) or np.any(q < cfg.domain_eps):
        return False
    excess = surrogate_gain_excess(params, q, y)
    if np.any(excess <= -1.0):
        return False
    return bool(np.all(np.log1p(excess) / LN2 >= cfg.g_floor))


def _newton_direction(jac: npt.NDArray[np.float64], c: npt.NDArray[np.float64]) -> Optional[npt.NDArray[np.float64]]:
    try:
        step = np.linalg.solve(jac, -c)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(step)):
        return None
    return step


def _gradient_step(
    params: SystemParams,
    q: npt.NDArray[np.float64],
    c: npt.NDArray[np.float64],
    y: Any, t: Any, theta: float, p: Any, u: Any,
    cfg: NewtonConfig,
) -> npt.NDArray[np.float64]:
    """Armijo-damped step along c = -grad of the q-objective."""
    f0 = q_objective(params, q, y, t, theta, p, u)
    slope = float(c @ c)
    alpha = 1.0 / theta
    for _ in range(cfg.max_backtracks):
        trial = q + alpha * c
        if _in_domain(params, trial, y, cfg):
            if q_objective(params, trial, y, t, theta, p, u) <= f0 - 1e-4 * alpha * slope:
                return trial
        alpha *= cfg.damping_shrink
    raise SingularJacobianError("Neither the Newton step nor the gradient fallback reduced the q-objective")


def q_update(
    params: SystemParams,
    y: Any,
    t: Any,
    theta: float,
    p: Any,
    u: Any,
    cfg: Optional[NewtonConfig] = None,
    q_init: Any = None,
) -> NewtonResult:
    """
    Solves c(q) = 0 by damped Newton iterations.

    A full step is shortened by ``damping_shrink`` until the trial point lies
    in the surrogate domain and ||c||_2 decreases. If the Jacobian is singular
    or no damped step is acceptable, one gradient step on the q-objective is
    taken instead.

    Args:
        q_init: Start point, defaults to ``p``. Must lie in the domain.

    Returns:
        NewtonResult with ||c(q)||_inf <= cfg.tol.

    Raises:
        SurrogateDomainError: Start point outside the domain.
        NewtonDivergedError: Tolerance not reached within cfg.max_iter.
        SingularJacobianError: The gradient fallback could not make progress.
    """
    cfg = cfg or NewtonConfig()
    p = params.check_vector(p, "p")
    u = params.check_vector(u, "u")
    q = params.check_vector(p if q_init is None else q_init, "q_init").copy()
    if not _in_domain(params, q, y, cfg):
        raise SurrogateDomainError("Newton start point lies outside the surrogate domain")

    c = newton_residual(params, q, y, t, theta, p, u)
    result = NewtonResult(q=q, iterations=0, residual_norms=[float(np.max(np.abs(c)))])

    for it in range(cfg.max_iter):
        if result.residual_norms[-1] <= cfg.tol:
            result.q, result.iterations = q, it
            return result

        step = _newton_direction(newton_jacobian(params, q, y, t, theta), c)
        accepted: Optional[npt.NDArray[np.float64]] = None
        c_accepted: Optional[npt.NDArray[np.float64]] = None
        if step is not None:
            merit = float(np.linalg.norm(c))
            alpha = 1.0
            for _ in range(cfg.max_backtracks):
                trial = q + alpha * step
                if _in_domain(params, trial, y, cfg):
                    c_trial = newton_residual(params, trial, y, t, theta, p, u)
                    if np.linalg.norm(c_trial) < merit:
                        accepted, c_accepted = trial, c_trial
                        break
                alpha *= cfg.damping_shrink
            if accepted is not None and alpha < 1.0:
                result.damped_steps += 1

        if accepted is None:
            logger.warning(f"Newton step rejected at iteration {it}, taking a gradient step")
            accepted = _gradient_step(params, q, c, y, t, theta, p, u, cfg)
            result.fallback_steps += 1

        q = accepted
        c = c_accepted if c_accepted is not None else newton_residual(params, q, y, t, theta, p, u)
        result.residual_norms.append(float(np.max(np.abs(c))))
        logger.debug(f"Newton iter {it + 1}: ||c||_inf = {result.residual_norms[-1]:.3e}")

    if result.residual_norms[-1] <= cfg.tol:
        result.q, result.iterations = q, cfg.max_iter
        return result
    raise NewtonDivergedError(
        f"Newton did not converge in {cfg.max_iter} iterations (||c||_inf = {result.residual_norms[-1]:.3e})"
    )


def admm_inner_loop(
    params: SystemParams,
    state: TransformState,
    admm: AdmmState,
    *,
    delta1: float,
    max_inner: int,
    newton: Optional[NewtonConfig] = None,
    refresh_y: bool = True,
) -> InnerLoopResult:
    """
    Runs p/q/(y)/u updates until the primal residual ||p - q|| is below
    delta1 * max(P_max) and the dual residual theta ||q_k - q_{k-1}|| is below
    delta1 * theta ||u||.

    ``state.y`` is refreshed from q after every q-update when ``refresh_y``
    is set. ``admm`` and ``state`` are updated in place.
    """
    newton = newton or NewtonConfig()
    threshold = delta1 * float(np.max(params.p_max))
    result = InnerLoopResult(converged=False, iterations=0)

    for k in range(1, max_inner + 1):
        q_prev = admm.q
        admm.p = p_update(params, state.t, admm.q, admm.u, admm.theta)
        step = q_update(params, state.y, state.t, admm.theta, admm.p, admm.u, newton, q_init=admm.q)
        admm.q = step.q
        if refresh_y:
            state.y = update_y(params, admm.q)
        admm.u = u_update(admm.u, admm.p, admm.q)

        residual = primal_residual(admm.p, admm.q)
        dual = admm.theta * float(np.linalg.norm(admm.q - q_prev))
        admm.iter += 1
        admm.primal_residual_history.append(residual)
        result.residuals.append(residual)
        result.newton_iterations.append(step.iterations)
        result.dual_residuals.append(dual)
        result.iterations = k
        if residual < threshold and dual <= delta1 * admm.theta * float(np.linalg.norm(admm.u)):
            result.converged = True
            return result

    logger.warning(f"ADMM inner loop hit max_inner={max_inner} (residual {result.residuals[-1]:.3e} W)")
    return result
