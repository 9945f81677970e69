"""
Scenario Data Model
===================
Physical parameters of a simulated deployment. All values are stored in the
units the channel generator consumes: watts for powers, dB for gains, dBm/Hz
for the noise density. Unit-suffixed keys from config files are converted by
``ScenarioConfig.from_dict``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict

from sieeopt.errors import InvalidParameterError

logger = logging.getLogger(__name__)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


# key suffix -> conversion to watts
_POWER_UNITS = {
    "_w": lambda v: v,
    "_mw": lambda v: v * 1e-3,
    "_dbm": dbm_to_watts,
}
_POWER_FIELDS = ("circuit_power", "p_max")


@dataclass
class ScenarioConfig:
    n_bs: int = 2
    cell_radius_m: float = 20.0
    pathloss_exponent: float = 3.5
    gain_at_1m_db: float = -70.0
    noise_psd_dbm_hz: float = -170.0
    noise_figure_db: float = 10.0
    bandwidth_hz: float = 1e4
    phi: float = 2.5
    circuit_power_w: float = 0.5e-3
    p_max_w: float = 0.3e-3
    # Put user 0 on its cell edge facing BS 1 and the others in the inner half of their cells.
    weak_user: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_bs < 1:
            raise InvalidParameterError(f"n_bs must be >= 1, got {self.n_bs}")
        if not self.cell_radius_m > 1.0:
            raise InvalidParameterError(f"cell_radius_m must exceed the 1 m annulus floor, got {self.cell_radius_m}")
        if self.pathloss_exponent < 2.0:
            raise InvalidParameterError(f"pathloss_exponent must be >= 2, got {self.pathloss_exponent}")
        for name in ("bandwidth_hz", "phi", "circuit_power_w", "p_max_w"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise InvalidParameterError(f"'{name}' must be positive, got {value}")
        if self.seed < 0:
            raise InvalidParameterError("seed must be unsigned")

    @property
    def noise_power_w(self) -> float:
        """sigma^2 = N0 * B * Nf in watts."""
        return dbm_to_watts(self.noise_psd_dbm_hz) * self.bandwidth_hz * db_to_linear(self.noise_figure_db)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @staticmethod
    def from_dict(data: Dict[str, Any]) -> ScenarioConfig:
        """
        Builds a config from flat key/value pairs.

        Power fields accept the suffixes ``_w``, ``_mw`` and ``_dbm``
        (e.g. ``p_max_mw = 0.3``); ``bandwidth_khz`` is accepted too.

        Raises:
            InvalidParameterError: Unknown key or a power given twice.
        """
        known = {f.name for f in fields(ScenarioConfig)}
        kwargs: Dict[str, Any] = {}
        for key, value in data.items():
            if key in known:
                target, converted = key, value
            elif key == "bandwidth_khz":
                target, converted = "bandwidth_hz", float(value) * 1e3
            else:
                target, converted = _convert_power_key(key, value)
            if target in kwargs:
                raise InvalidParameterError(f"'{target}' is given more than once")
            kwargs[target] = converted
        return ScenarioConfig(**kwargs)


def _convert_power_key(key: str, value: Any) -> tuple[str, float]:
    for base in _POWER_FIELDS:
        for suffix, to_watts in _POWER_UNITS.items():
            if key == base + suffix:
                return f"{base}_w", float(to_watts(float(value)))
    raise InvalidParameterError(f"Unknown scenario key '{key}'")
