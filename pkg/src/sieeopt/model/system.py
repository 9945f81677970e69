"""
System Model
============
Physical description of one multi-BS downlink instance and the quantities the
optimizers are built from: SINR, rate, power consumption, the SIEE objective
and the quadratic-transform surrogate rate.

Conventions:
    - gains[i, j] is the linear power gain from BS i to user j.
    - All powers are linear watts. dB values are converted before they reach
      this module (see ``sieeopt.model.scenario``).
    - Rates are in bits/s/Hz (log2 form). Bandwidth only enters through the
      noise power.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Dict

import numpy as np

from sieeopt.errors import (
    DimensionMismatchError,
    InvalidParameterError,
    SurrogateDomainError,
    ZeroRateError,
)

if TYPE_CHECKING:
    import numpy.typing as npt

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


def _as_vector(value: Any) -> npt.NDArray[np.float64]:
    arr = np.array(value, dtype=np.float64).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SystemParams:
    """
    One problem instance.

    Attributes:
        gains: I x I matrix, gains[i, j] = gain from BS i to user j.
        phi: Inverse amplifier efficiency per BS.
        circuit_power: Static circuit power Q_i per BS [W].
        p_max: Per-BS transmit power cap P_i [W].
        noise_power: Receiver noise power sigma^2 [W].
    """
    gains: npt.NDArray[np.float64]
    phi: npt.NDArray[np.float64]
    circuit_power: npt.NDArray[np.float64]
    p_max: npt.NDArray[np.float64]
    noise_power: float

    def __post_init__(self) -> None:
        gains = np.array(self.gains, dtype=np.float64)
        if gains.ndim != 2 or gains.shape[0] != gains.shape[1] or gains.shape[0] < 1:
            raise DimensionMismatchError(f"Gain matrix must be square and non-empty, got shape {gains.shape}")
        gains.setflags(write=False)
        object.__setattr__(self, "gains", gains)

        n = gains.shape[0]
        for name in ("phi", "circuit_power", "p_max"):
            vec = _as_vector(getattr(self, name))
            if vec.size != n:
                raise DimensionMismatchError(f"'{name}' has length {vec.size}, expected {n}")
            if not np.all(np.isfinite(vec)) or np.any(vec <= 0.0):
                raise InvalidParameterError(f"'{name}' must be finite and strictly positive")
            object.__setattr__(self, name, vec)

        if not np.all(np.isfinite(gains)) or np.any(gains < 0.0):
            raise InvalidParameterError("Gains must be finite and nonnegative")
        if np.any(np.diag(gains) <= 0.0):
            raise InvalidParameterError("Direct-link gains (diagonal) must be strictly positive")

        noise = float(self.noise_power)
        if not math.isfinite(noise) or noise <= 0.0:
            raise InvalidParameterError(f"Noise power must be positive, got {self.noise_power}")
        object.__setattr__(self, "noise_power", noise)

    @property
    def n_bs(self) -> int:
        """Number of BS/user pairs I."""
        return int(self.gains.shape[0])

    @property
    def direct_gains(self) -> npt.NDArray[np.float64]:
        return np.diag(self.gains)

    @classmethod
    def from_arrays(
        cls,
        gains: Any,
        phi: Any,
        circuit_power: Any,
        p_max: Any,
        noise_power: float,
    ) -> SystemParams:
        """
        Builds an instance, broadcasting scalar phi / circuit_power / p_max to
        every BS.
        """
        n = np.asarray(gains).shape[0]
        return cls(
            gains=np.asarray(gains, dtype=np.float64),
            phi=np.broadcast_to(np.asarray(phi, dtype=np.float64), (n,)),
            circuit_power=np.broadcast_to(np.asarray(circuit_power, dtype=np.float64), (n,)),
            p_max=np.broadcast_to(np.asarray(p_max, dtype=np.float64), (n,)),
            noise_power=noise_power,
        )

    def check_vector(self, p: Any, name: str = "p") -> npt.NDArray[np.float64]:
        """Returns ``p`` as a float vector, raising if its length is not I."""
        arr = np.asarray(p, dtype=np.float64).reshape(-1)
        if arr.size != self.n_bs:
            raise DimensionMismatchError(f"'{name}' has length {arr.size}, expected {self.n_bs}")
        return arr

    def check_index(self, i: int) -> int:
        if not 0 <= i < self.n_bs:
            raise IndexError(f"Index {i} out of range for I={self.n_bs}")
        return i

    def interference(self, p: Any) -> npt.NDArray[np.float64]:
        """Interference-plus-noise at each user: sum_{j != i} h_{j,i} p_j + sigma^2."""
        p = self.check_vector(p)
        return p @ self.gains - self.direct_gains * p + self.noise_power

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gains": self.gains.tolist(),
            "phi": self.phi.tolist(),
            "circuit_power": self.circuit_power.tolist(),
            "p_max": self.p_max.tolist(),
            "noise_power": self.noise_power,
        }

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> SystemParams:
        return SystemParams(
            gains=np.asarray(data["gains"], dtype=np.float64),
            phi=np.asarray(data["phi"], dtype=np.float64),
            circuit_power=np.asarray(data["circuit_power"], dtype=np.float64),
            p_max=np.asarray(data["p_max"], dtype=np.float64),
            noise_power=float(data["noise_power"]),
        )


def as_power_allocation(params: SystemParams, p: Any) -> npt.NDArray[np.float64]:
    """
    Validates membership in the feasible box 0 <= p_i <= P_i.

    Raises:
        DimensionMismatchError: Wrong length.
        InvalidParameterError: Any entry outside its box.
    """
    arr = params.check_vector(p)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > params.p_max):
        raise InvalidParameterError(f"Power allocation {arr} is outside [0, P_max]")
    return arr


# --- Vectorized model quantities ---

def sinrs(params: SystemParams, p: Any) -> npt.NDArray[np.float64]:
    p = params.check_vector(p)
    return params.direct_gains * p / params.interference(p)


def rates(params: SystemParams, p: Any) -> npt.NDArray[np.float64]:
    """A_i(p) = log2(1 + SINR_i) in bits/s/Hz."""
    return np.log1p(sinrs(params, p)) / LN2


def power_consumptions(params: SystemParams, p: Any) -> npt.NDArray[np.float64]:
    """B_i(p) = phi_i p_i + Q_i in watts."""
    p = params.check_vector(p)
    return params.phi * p + params.circuit_power


def per_user_iee(params: SystemParams, p: Any) -> npt.NDArray[np.float64]:
    """
    Inverse energy efficiency B_i/A_i of every user.

    Raises:
        ZeroRateError: If any user has zero rate.
    """
    a = rates(params, p)
    if np.any(a <= 0.0):
        users = np.flatnonzero(a <= 0.0).tolist()
        raise ZeroRateError(f"Zero-rate user(s) {users}: inverse energy efficiency is unbounded")
    return power_consumptions(params, p) / a


def energy_efficiency(params: SystemParams, p: Any) -> npt.NDArray[np.float64]:
    """Conventional EE A_i/B_i in bits/s/Hz per watt."""
    return rates(params, p) / power_consumptions(params, p)


def siee_objective(params: SystemParams, p: Any) -> float:
    """F1(p) = sum_i B_i(p)/A_i(p)."""
    return float(np.sum(per_user_iee(params, p)))


def sum_rate(params: SystemParams, p: Any) -> float:
    return float(np.sum(rates(params, p)))


# --- Scalar views ---

def sinr(params: SystemParams, p: Any, i: int) -> float:
    return float(sinrs(params, p)[params.check_index(i)])


def rate(params: SystemParams, p: Any, i: int) -> float:
    return float(rates(params, p)[params.check_index(i)])


def power_consumption(params: SystemParams, p: Any, i: int) -> float:
    return float(power_consumptions(params, p)[params.check_index(i)])


# --- Quadratic-transform surrogate ---

def surrogate_gain_excess(params: SystemParams, q: Any, y: Any) -> npt.NDArray[np.float64]:
    """
    g_i - 1 = 2 y_i sqrt(h_ii q_i) - y_i^2 (interference_i).

    Kept separate from ``g`` so that log1p keeps full precision at low SINR.
    """
    q = params.check_vector(q, "q")
    y = params.check_vector(y, "y")
    if np.any(q < 0.0):
        raise SurrogateDomainError("Surrogate evaluated at a negative power")
    return 2.0 * y * np.sqrt(params.direct_gains * q) - y**2 * params.interference(q)


def surrogate_rates(
    params: SystemParams, q: Any, y: Any
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Vectorized surrogate rate.

    Returns:
        (g, Ahat) with Ahat = log2(g).

    Raises:
        SurrogateDomainError: If any g_i <= 0.
    """
    excess = surrogate_gain_excess(params, q, y)
    g = 1.0 + excess
    if np.any(g <= 0.0):
        users = np.flatnonzero(g <= 0.0).tolist()
        raise SurrogateDomainError(f"Surrogate argument g <= 0 for user(s) {users}")
    return g, np.log1p(excess) / LN2


def surrogate_rate(params: SystemParams, q: Any, y_i: float, i: int) -> tuple[float, float]:
    """
    Surrogate rate of user ``i`` for a scalar auxiliary ``y_i``.

    Only user ``i``'s term depends on ``y_i``; other entries of the auxiliary
    vector are irrelevant here.
    """
    params.check_index(i)
    if y_i <= 0.0:
        raise InvalidParameterError(f"Auxiliary y_{i} must be positive, got {y_i}")
    q = params.check_vector(q, "q")
    if np.any(q < 0.0):
        raise SurrogateDomainError("Surrogate evaluated at a negative power")
    interference = float(params.interference(q)[i])
    excess = 2.0 * y_i * math.sqrt(params.gains[i, i] * q[i]) - y_i**2 * interference
    g = 1.0 + excess
    if g <= 0.0:
        raise SurrogateDomainError(f"Surrogate argument g={g:.3e} <= 0 for user {i}")
    return g, math.log1p(excess) / LN2
