"""Test cases for scenario configs, channel generation and file I/O."""
import json
import os
import sys

import numpy as np
import pytest

from sieeopt.config import DEFAULT_SCENARIO_PATH, get_resource_path
from sieeopt.errors import InvalidParameterError
from sieeopt.model.io import APP_VERSION, IOManager
from sieeopt.model.scenario import ScenarioConfig, db_to_linear, dbm_to_watts
from sieeopt.controller.channels import drop_users, gen_channels


def test_unit_conversions() -> None:
    assert db_to_linear(-70.0) == pytest.approx(1e-7)
    assert dbm_to_watts(0.0) == pytest.approx(1e-3)
    assert dbm_to_watts(30.0) == pytest.approx(1.0)


def test_default_noise_power() -> None:
    assert ScenarioConfig().noise_power_w == pytest.approx(1e-15, rel=1e-12)


def test_gain_follows_path_loss() -> None:
    cfg = ScenarioConfig(n_bs=3)
    bs, users = drop_users(cfg, np.random.default_rng(4))
    params = gen_channels(cfg, np.random.default_rng(4))
    distances = np.linalg.norm(bs[:, None, :] - users[None, :, :], axis=-1)
    np.testing.assert_allclose(params.gains, 1e-7 * distances**-3.5, rtol=1e-12)


def test_unit_distance_gain() -> None:
    cfg = ScenarioConfig(n_bs=1)
    # at d = 1 m the path loss term is 1
    assert db_to_linear(cfg.gain_at_1m_db) * 1.0 ** (-cfg.pathloss_exponent) == pytest.approx(1e-7)


@pytest.mark.parametrize("seed", range(10))
def test_users_stay_in_their_cells(seed: int) -> None:
    cfg = ScenarioConfig(n_bs=4)
    bs, users = drop_users(cfg, np.random.default_rng(seed))
    np.testing.assert_allclose(bs[:, 0], 2.0 * cfg.cell_radius_m * np.arange(4))
    own = np.linalg.norm(users - bs, axis=1)
    assert np.all((own >= 1.0) & (own <= cfg.cell_radius_m))


def test_weak_user_layout() -> None:
    cfg = ScenarioConfig(n_bs=3, weak_user=True)
    bs, users = drop_users(cfg, np.random.default_rng(0))
    own = np.linalg.norm(users - bs, axis=1)
    assert own[0] == pytest.approx(cfg.cell_radius_m)
    assert np.linalg.norm(users[0] - bs[1]) == pytest.approx(cfg.cell_radius_m)
    assert np.all(own[1:] <= cfg.cell_radius_m / 2.0)


def test_channels_are_deterministic() -> None:
    cfg = ScenarioConfig(n_bs=3)
    a = gen_channels(cfg, np.random.default_rng(11))
    b = gen_channels(cfg, np.random.default_rng(11))
    np.testing.assert_array_equal(a.gains, b.gains)
    assert a.noise_power == cfg.noise_power_w
    np.testing.assert_array_equal(a.p_max, np.full(3, cfg.p_max_w))


@pytest.mark.parametrize(
    "kwargs",
    [{"n_bs": 0}, {"cell_radius_m": 1.0}, {"pathloss_exponent": 1.5}, {"phi": 0.0}, {"p_max_w": -1.0}, {"seed": -1}],
)
def test_invalid_scenario(kwargs) -> None:
    with pytest.raises(InvalidParameterError):
        ScenarioConfig(**kwargs)


def test_unit_suffixed_keys() -> None:
    cfg = ScenarioConfig.from_dict({"p_max_dbm": 0.0, "circuit_power_mw": 0.5, "bandwidth_khz": 20.0})
    assert cfg.p_max_w == pytest.approx(1e-3)
    assert cfg.circuit_power_w == pytest.approx(0.5e-3)
    assert cfg.bandwidth_hz == pytest.approx(2e4)


@pytest.mark.parametrize(
    "data",
    [{"p_max_w": 1e-3, "p_max_mw": 1.0}, {"bandwidth_hz": 1e4, "bandwidth_khz": 10.0}, {"antennas": 4}],
)
def test_bad_scenario_keys(data) -> None:
    with pytest.raises(InvalidParameterError):
        ScenarioConfig.from_dict(data)


def test_default_scenario_file() -> None:
    cfg = IOManager.load_scenario(DEFAULT_SCENARIO_PATH)
    default = ScenarioConfig()
    for key, value in default.to_dict().items():
        if isinstance(value, float):
            assert getattr(cfg, key) == pytest.approx(value, rel=1e-12)
        else:
            assert getattr(cfg, key) == value


def test_resources_resolve_inside_the_package(monkeypatch: pytest.MonkeyPatch, tmp_path) -> None:
    monkeypatch.setattr(sys, "_MEIPASS", str(tmp_path), raising=False)
    path = get_resource_path("assets")
    assert os.path.isdir(path)
    assert os.path.dirname(DEFAULT_SCENARIO_PATH) == path
    assert not path.startswith(str(tmp_path))


def test_overrides_win_over_file(tmp_path) -> None:
    path = tmp_path / "scenario.toml"
    path.write_text("n_bs = 3\nseed = 5\n")
    cfg = IOManager.load_scenario(str(path), {"n_bs": 4, "seed": None})
    assert cfg.n_bs == 4
    assert cfg.seed == 5


def test_invalid_scenario_files(tmp_path) -> None:
    broken = tmp_path / "broken.toml"
    broken.write_text("n_bs = = 2\n")
    with pytest.raises(InvalidParameterError):
        IOManager.read_scenario_file(str(broken))

    nested = tmp_path / "nested.toml"
    nested.write_text("[solver]\ndelta2 = 1e-5\n")
    with pytest.raises(InvalidParameterError):
        IOManager.read_scenario_file(str(nested))


def test_csv_keeps_full_precision(tmp_path) -> None:
    path = tmp_path / "out" / "table.csv"
    IOManager.write_csv(str(path), ["user", "p_w"], [{"user": 0, "p_w": 0.1 + 0.2}, {"user": 1, "p_w": 1e-17}])
    rows = IOManager.read_csv(str(path))
    assert rows == [{"user": "0", "p_w": repr(0.1 + 0.2)}, {"user": "1", "p_w": "1e-17"}]
    assert float(rows[0]["p_w"]) == 0.1 + 0.2


def test_manifest(tmp_path) -> None:
    path = IOManager.write_manifest(str(tmp_path), "solve", {"n_bs": 2}, 7)
    with open(path, encoding="utf-8") as f:
        manifest = json.load(f)
    assert manifest == {"command": "solve", "version": APP_VERSION, "seed": 7, "config": {"n_bs": 2}}
