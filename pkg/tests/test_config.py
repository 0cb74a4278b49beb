import dataclasses
import math

import pytest

from skycell import ConfigurationError, ScenarioConfig, config_as_dict, load_config


def test_defaults():
    cfg = ScenarioConfig()
    assert cfg.n_elements == 64
    assert cfg.n_waypoints == 400
    assert cfg.n_sectors == 3
    assert cfg.per_prb_power_dbm == pytest.approx(26.0)
    assert cfg.rician_k_linear == pytest.approx(10 ** 1.422)
    assert cfg.carrier_wavelength_m == pytest.approx(0.0857, abs=1e-4)


def test_per_prb_power_tracks_prb_count():
    cfg = dataclasses.replace(ScenarioConfig(), n_prb=50)
    assert cfg.per_prb_power_dbm == pytest.approx(46.0 - 10 * math.log10(50))


@pytest.mark.parametrize(
    "field,value",
    [
        ("area_km2", -1.0),
        ("panel_rows", 0),
        ("eigen_threshold", 1.5),
        ("alpha", -0.1),
        ("n_drops", 0),
        ("master_seed", -3),
        ("m2_snr_reference", "bogus"),
        ("ccuav_placement", "bogus"),
        ("selection_shadow", "bogus"),
    ],
)
def test_invalid_values_rejected(field, value):
    with pytest.raises(ConfigurationError):
        dataclasses.replace(ScenarioConfig(), **{field: value})


def test_swarm_must_fit_route():
    with pytest.raises(ConfigurationError):
        dataclasses.replace(ScenarioConfig(), n_ccuav=9)  # 8*50 m > 399 m span


def test_load_flat_file(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(
        """
        # comment and blank lines are ignored
        n_ccuav = 3
        alpha = 0.25

        carrier_hz = 2.0e9  # inline comment
        """
    )
    cfg = load_config(path)
    assert cfg.n_ccuav == 3
    assert cfg.alpha == 0.25
    assert cfg.carrier_hz == 2.0e9
    assert cfg.n_routes == ScenarioConfig().n_routes  # default preserved


def test_load_json_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text('{"n_ccuav": 2, "eigen_threshold": 0.2}')
    cfg = load_config(path)
    assert cfg.n_ccuav == 2
    assert cfg.eigen_threshold == 0.2


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("no_such_key = 1\n")
    with pytest.raises(ConfigurationError, match="no_such_key"):
        load_config(path)


def test_non_integer_for_int_field_rejected(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("n_ccuav = 2.5\n")
    with pytest.raises(ConfigurationError):
        load_config(path)


def test_missing_file():
    with pytest.raises(ConfigurationError):
        load_config("/nonexistent/skycell.cfg")


def test_config_as_dict_round_trip(tmp_path):
    cfg = dataclasses.replace(ScenarioConfig(), n_ccuav=4, master_seed=99)
    d = config_as_dict(cfg)
    assert d["n_ccuav"] == 4 and d["master_seed"] == 99
    path = tmp_path / "resolved.json"
    import json

    path.write_text(json.dumps(d))
    assert load_config(path) == cfg
