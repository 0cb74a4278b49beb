import dataclasses

import pytest

from skycell import ScenarioConfig, build_scenario


@pytest.fixture(scope="session")
def default_config():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def default_scenario(default_config):
    return build_scenario(default_config)


@pytest.fixture()
def small_config():
    """Cheap scenario for engine/CLI tests."""
    return dataclasses.replace(
        ScenarioConfig(),
        panel_rows=4,
        panel_cols=4,
        n_routes=2,
        route_rotation_step_deg=90.0,
        n_drops=10,
        n_shadow_sinusoids=20,
    )
