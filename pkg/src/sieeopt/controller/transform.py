"""
Fraction & Quadratic Transforms
===============================
Surrogates that turn a sum of ratios B_i/A_i into a problem that is convex in
each block of variables.

Fraction transform (per term, auxiliary t > 0):
    B/A = min_t  t B^2 + 1/(4 t A^2),   attained at t = 1/(2 A B).
    The gap is the completed square (sqrt(t) B - 1/(2 sqrt(t) A))^2.

Quadratic transform (per user, auxiliary y > 0):
    log2(1 + SINR_i) >= log2(g_i(q, y_i)), tight at
    y_i = sqrt(h_ii q_i) / interference_i(q).

Combining both gives F3(p, q; t, y), which majorizes F1 and touches it when
(t, y) are refreshed at the current point.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum
from typing import TYPE_CHECKING, Any

import numpy as np

from sieeopt.errors import (
    DimensionMismatchError,
    InvalidOperatingPointError,
    InvalidParameterError,
    InvalidTransformOperandError,
    SurrogateDomainError,
)
from sieeopt.model.system import (
    SystemParams,
    power_consumptions,
    rates,
    surrogate_rates,
)

if TYPE_CHECKING:
    import numpy.typing as npt

logger = logging.getLogger(__name__)


class YUpdatePolicy(StrEnum):
    """Where the quadratic-transform auxiliary y is refreshed."""
    INNER = "inner"  # from q, after every q-update of the ADMM loop
    OUTER = "outer"  # from p, once per outer iteration


def _positive_operands(A: Any, B: Any) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    a = np.atleast_1d(np.asarray(A, dtype=np.float64))
    b = np.atleast_1d(np.asarray(B, dtype=np.float64))
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Operand shapes differ: {a.shape} vs {b.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))) or np.any(a <= 0.0) or np.any(b <= 0.0):
        raise InvalidTransformOperandError("Fraction transform needs strictly positive numerators and denominators")
    return a, b


def update_t(A_vals: Any, B_vals: Any) -> npt.NDArray[np.float64]:
    """
    Optimal fraction-transform auxiliary t_i = 1/(2 A_i B_i).

    Args:
        A_vals: Denominators (rates), all > 0.
        B_vals: Numerators (power consumptions), all > 0.

    Raises:
        InvalidTransformOperandError: On any nonpositive operand.
    """
    a, b = _positive_operands(A_vals, B_vals)
    return 1.0 / (2.0 * a * b)


def fraction_surrogate(A: Any, B: Any, t: Any) -> npt.NDArray[np.float64]:
    """Per-term t B^2 + 1/(4 t A^2)."""
    a, b = _positive_operands(A, B)
    t = np.broadcast_to(np.asarray(t, dtype=np.float64), a.shape)
    if np.any(t <= 0.0):
        raise InvalidTransformOperandError("Auxiliary t must be strictly positive")
    return t * b**2 + 1.0 / (4.0 * t * a**2)


def fraction_gap(A: Any, B: Any, t: Any) -> npt.NDArray[np.float64]:
    """Completed square by which ``fraction_surrogate`` exceeds B/A."""
    a, b = _positive_operands(A, B)
    t = np.broadcast_to(np.asarray(t, dtype=np.float64), a.shape)
    if np.any(t <= 0.0):
        raise InvalidTransformOperandError("Auxiliary t must be strictly positive")
    root_t = np.sqrt(t)
    return (root_t * b - 1.0 / (2.0 * root_t * a)) ** 2


def update_y(params: SystemParams, q: Any) -> npt.NDArray[np.float64]:
    """
    Tight quadratic-transform auxiliary y_i = sqrt(h_ii q_i) / interference_i(q).

    Raises:
        InvalidOperatingPointError: If any q_i <= 0.
    """
    q = params.check_vector(q, "q")
    if np.any(q <= 0.0):
        raise InvalidOperatingPointError(f"y-update needs strictly positive powers, got {q}")
    return np.sqrt(params.direct_gains * q) / params.interference(q)


@dataclass
class TransformState:
    """Auxiliary vectors of both transforms. Mutated in place by the solver."""
    t: npt.NDArray[np.float64]
    y: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        self.t = np.asarray(self.t, dtype=np.float64).reshape(-1).copy()
        self.y = np.asarray(self.y, dtype=np.float64).reshape(-1).copy()
        if self.t.size != self.y.size:
            raise DimensionMismatchError(f"t has {self.t.size} entries, y has {self.y.size}")
        if np.any(self.t <= 0.0) or np.any(self.y <= 0.0):
            raise InvalidParameterError("Transform auxiliaries t and y must be strictly positive")

    @classmethod
    def initial(cls, params: SystemParams, p: Any) -> TransformState:
        """Both auxiliaries made tight at the operating point ``p``."""
        p = params.check_vector(p)
        return cls(
            t=update_t(rates(params, p), power_consumptions(params, p)),
            y=update_y(params, p),
        )


def surrogate_objective_f3(
    params: SystemParams,
    p: Any,
    q: Any,
    state: TransformState,
) -> float:
    """
    F3 = sum_i t_i B_i(p)^2 + sum_i 1/(4 t_i Ahat_i(q, y_i)^2).

    Pass ``q = p`` for the undecoupled surrogate.

    Raises:
        SurrogateDomainError: If any Ahat_i(q, y_i) <= 0.
    """
    b = power_consumptions(params, p)
    _, ahat = surrogate_rates(params, q, state.y)
    if np.any(ahat <= 0.0):
        users = np.flatnonzero(ahat <= 0.0).tolist()
        raise SurrogateDomainError(f"Surrogate rate is not positive for user(s) {users}")
    return float(np.sum(fraction_surrogate(ahat, b, state.t)))
