"""Scenario configuration: the single parameter record every stage consumes.

A scenario is fully described by one :class:`ScenarioConfig`.  Configs can be
built in code or loaded from a human-editable file (flat ``key = value`` lines
or a JSON object) where keys match the dataclass field names exactly; absent
keys keep their defaults.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigurationError

LIGHT_SPEED_M_S = 299_792_458.0

METRIC_NAMES = ("rsrp", "m1", "m2")

#: SNR reference for the capacity-style selection metric: "unit" treats the
#: linear per-PRB RSRP (mW) itself as the SNR argument, "thermal" divides it
#: by the per-PRB thermal noise power first.
M2_SNR_REFERENCES = ("unit", "thermal")

#: Swarm deployment: "centered" parks the swarm symmetrically around the
#: route midpoint every drop, "uniform" draws the start waypoint uniformly.
CCUAV_PLACEMENTS = ("centered", "uniform")

#: Shadow realization entering the selection-stage RSRP: "measurement" uses
#: an independent measurement-epoch draw (the UE moves at least one
#: decorrelation distance between measuring and being served), while
#: "instantaneous" reuses the data-epoch shadowing.
SELECTION_SHADOW_MODES = ("measurement", "instantaneous")


@dataclass(frozen=True)
class ScenarioConfig:
    area_km2: float = 0.22
    n_sectors: int = 3
    sector_height_m: float = 25.0
    panel_rows: int = 8
    panel_cols: int = 8
    design_wavelength_m: float = 0.0857
    carrier_hz: float = 3.5e9
    n_routes: int = 18
    route_length_m: float = 400.0
    waypoint_spacing_m: float = 1.0
    route_rotation_step_deg: float = 10.0
    aerial_altitude_m: float = 100.0
    gue_height_m: float = 1.5
    n_gue_per_sector: int = 2
    n_ccuav: int = 5
    ccuav_spacing_m: float = 50.0
    total_tx_power_dbm: float = 46.0
    n_prb: int = 100
    rician_k_db: float = 14.22
    eigen_threshold: float = 0.10
    alpha: float = 0.50
    n_drops: int = 1000
    master_seed: int = 12345
    # Deployment details that the headline parameter set leaves open.
    sector_ring_radius_m: float = 250.0
    panel_downtilt_deg: float = 12.0
    noise_figure_db: float = 9.0
    prb_bandwidth_hz: float = 180e3
    n_shadow_sinusoids: int = 100
    m2_snr_reference: str = "unit"
    ccuav_placement: str = "centered"
    selection_shadow: str = "measurement"

    def __post_init__(self) -> None:
        self.validate()

    # -- derived quantities -------------------------------------------------

    @property
    def n_elements(self) -> int:
        """Antennas per panel (rows x columns)."""
        return self.panel_rows * self.panel_cols

    @property
    def n_waypoints(self) -> int:
        """Waypoints per route; spacing is exact, so the route spans
        (n_waypoints - 1) * waypoint_spacing_m metres."""
        return int(round(self.route_length_m / self.waypoint_spacing_m))

    @property
    def per_prb_power_dbm(self) -> float:
        """Transmit power on one PRB: total power split evenly over all PRBs."""
        return self.total_tx_power_dbm - 10.0 * math.log10(self.n_prb)

    @property
    def carrier_wavelength_m(self) -> float:
        return LIGHT_SPEED_M_S / self.carrier_hz

    @property
    def n_gue_total(self) -> int:
        return self.n_sectors * self.n_gue_per_sector

    @property
    def rician_k_linear(self) -> float:
        return 10.0 ** (self.rician_k_db / 10.0)

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        if self.area_km2 <= 0:
            raise ConfigurationError("area_km2 must be positive")
        if self.n_sectors < 1:
            raise ConfigurationError("n_sectors must be >= 1")
        if self.panel_rows < 1 or self.panel_cols < 1:
            raise ConfigurationError("panel dimensions must be >= 1")
        if self.design_wavelength_m <= 0 or self.carrier_hz <= 0:
            raise ConfigurationError("wavelength and carrier frequency must be positive")
        if self.sector_height_m <= 0 or self.sector_ring_radius_m <= 0:
            raise ConfigurationError("sector placement parameters must be positive")
        if self.n_routes < 1:
            raise ConfigurationError("n_routes must be >= 1")
        if self.route_length_m <= 0 or self.waypoint_spacing_m <= 0:
            raise ConfigurationError("route length and waypoint spacing must be positive")
        if self.n_waypoints < 2:
            raise ConfigurationError("route must contain at least two waypoints")
        if self.aerial_altitude_m <= 0 or self.gue_height_m <= 0:
            raise ConfigurationError("UE heights must be positive")
        if self.n_gue_per_sector < 0 or self.n_ccuav < 0:
            raise ConfigurationError("UE counts must be non-negative")
        if self.ccuav_spacing_m <= 0:
            raise ConfigurationError("ccuav_spacing_m must be positive")
        if not 0.0 <= self.eigen_threshold <= 1.0:
            raise ConfigurationError("eigen_threshold must lie in [0, 1]")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError("alpha must lie in [0, 1]")
        if self.n_prb < 1:
            raise ConfigurationError("n_prb must be >= 1")
        if self.n_drops < 1:
            raise ConfigurationError("n_drops must be >= 1")
        if self.master_seed < 0:
            raise ConfigurationError("master_seed must be a non-negative integer")
        if self.noise_figure_db < 0 or self.prb_bandwidth_hz <= 0:
            raise ConfigurationError("noise parameters out of range")
        if self.n_shadow_sinusoids < 1:
            raise ConfigurationError("n_shadow_sinusoids must be >= 1")
        if self.m2_snr_reference not in M2_SNR_REFERENCES:
            raise ConfigurationError(
                f"m2_snr_reference must be one of {M2_SNR_REFERENCES}"
            )
        if self.ccuav_placement not in CCUAV_PLACEMENTS:
            raise ConfigurationError(f"ccuav_placement must be one of {CCUAV_PLACEMENTS}")
        if self.selection_shadow not in SELECTION_SHADOW_MODES:
            raise ConfigurationError(
                f"selection_shadow must be one of {SELECTION_SHADOW_MODES}"
            )
        # The swarm must fit on the waypoint grid of a route.
        span = (self.n_ccuav - 1) * self.ccuav_spacing_m
        usable = (self.n_waypoints - 1) * self.waypoint_spacing_m
        if span > usable:
            raise ConfigurationError(
                f"CCUAV swarm span {span:g} m exceeds the route waypoint span {usable:g} m"
            )


def _coerce(field: dataclasses.Field, raw: object, key: str) -> object:
    try:
        if field.type in ("int", int):
            if isinstance(raw, bool):
                raise ValueError
            value = int(str(raw), 0) if isinstance(raw, str) else int(raw)
            if float(value) != float(raw if not isinstance(raw, str) else value):
                raise ValueError
            return value
        if field.type in ("float", float):
            return float(raw)
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"invalid value for {key!r}: {raw!r}") from exc


def _parse_flat(text: str, path: Path) -> dict:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a scenario config file; missing keys fall back to defaults."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigurationError(f"{path}: top-level JSON value must be an object")
    else:
        raw = _parse_flat(text, path)

    fields = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
    kwargs = {}
    for key, value in raw.items():
        if key not in fields:
            raise ConfigurationError(f"unknown config key {key!r}")
        kwargs[key] = _coerce(fields[key], value, key)
    return ScenarioConfig(**kwargs)


def config_as_dict(config: ScenarioConfig) -> dict:
    """All fields, defaults expanded; suitable for manifests."""
    return dataclasses.asdict(config)
