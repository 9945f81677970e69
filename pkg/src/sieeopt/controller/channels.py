"""
Channel generation for a linear multi-cell layout.

BS i sits at (2 i R, 0). User i is dropped uniformly (by area) in the annulus
[1 m, R] around BS i. The gain from BS i to user j is G0 * d_ij^(-n).
"""
from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from sieeopt.errors import InvalidParameterError
from sieeopt.model.scenario import ScenarioConfig, db_to_linear
from sieeopt.model.system import SystemParams

if TYPE_CHECKING:
    import numpy.typing as npt

logger = logging.getLogger(__name__)

MIN_DISTANCE_M = 1.0


def drop_users(cfg: ScenarioConfig, rng: np.random.Generator) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Returns (bs_positions, user_positions), each of shape (n_bs, 2)."""
    n, radius = cfg.n_bs, cfg.cell_radius_m
    bs = np.column_stack([2.0 * radius * np.arange(n), np.zeros(n)])

    outer = radius / 2.0 if cfg.weak_user else radius
    r = np.sqrt(rng.uniform(MIN_DISTANCE_M**2, outer**2, size=n))
    angle = rng.uniform(0.0, 2.0 * np.pi, size=n)
    if cfg.weak_user:
        r[0], angle[0] = radius, 0.0
    users = bs + np.column_stack([r * np.cos(angle), r * np.sin(angle)])
    return bs, users


def gen_channels(cfg: ScenarioConfig, rng: np.random.Generator) -> SystemParams:
    """
    Draws one instance from the scenario.

    Raises:
        InvalidParameterError: If a BS-user distance falls below 1 m.
    """
    bs, users = drop_users(cfg, rng)
    distances = np.linalg.norm(bs[:, None, :] - users[None, :, :], axis=-1)
    if np.any(distances < MIN_DISTANCE_M):
        raise InvalidParameterError(f"BS-user distance below {MIN_DISTANCE_M} m: {distances.min():.3f} m")

    gains = db_to_linear(cfg.gain_at_1m_db) * distances ** (-cfg.pathloss_exponent)
    logger.debug(f"Generated {cfg.n_bs}-BS instance, direct distances {np.diag(distances)}")
    return SystemParams.from_arrays(
        gains=gains,
        phi=cfg.phi,
        circuit_power=cfg.circuit_power_w,
        p_max=cfg.p_max_w,
        noise_power=cfg.noise_power_w,
    )
