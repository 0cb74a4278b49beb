"""Deterministic scenario geometry and per-drop random placements.

Coordinates are metres in a right-handed frame: x east, y north, z up, with
the scenario center at the origin.  Compass bearings are degrees clockwise
from north, so a sector at bearing 180 sits south of the center.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .errors import ConfigurationError

#: Bearings (deg) and names of the default three-sector deployment: south,
#: west and north-east sites on a ring around the covered area.
DEFAULT_THREE_SECTOR_BEARINGS = (180.0, 270.0, 45.0)
DEFAULT_THREE_SECTOR_NAMES = ("MS_SO", "MS_WE", "MS_NE")


@dataclass(frozen=True, eq=False)
class SectorGeometry:
    """One macro sector: a planar antenna panel at a fixed site.

    The panel is vertical (before downtilt), its columns run horizontally
    perpendicular to the boresight and its rows run vertically.  Element
    order is row-major starting at the bottom-left of the panel as seen from
    the boresight direction.
    """

    name: str
    position: np.ndarray            # (3,) site coordinates, metres
    boresight_azimuth_rad: float    # math convention: 0 = +x, pi/2 = +y
    downtilt_rad: float
    n_rows: int
    n_cols: int
    element_spacing_m: float

    @property
    def n_elements(self) -> int:
        return self.n_rows * self.n_cols

    def local_basis(self) -> np.ndarray:
        """Rows: boresight, horizontal-left, panel-up unit vectors."""
        ca, sa = np.cos(self.boresight_azimuth_rad), np.sin(self.boresight_azimuth_rad)
        cd, sd = np.cos(self.downtilt_rad), np.sin(self.downtilt_rad)
        boresight = np.array([cd * ca, cd * sa, -sd])
        left = np.array([-sa, ca, 0.0])
        up = np.array([sd * ca, sd * sa, cd])
        return np.vstack([boresight, left, up])

    def element_positions(self) -> np.ndarray:
        """(n_elements, 3) coordinates of the panel elements, row-major."""
        _, left, up = self.local_basis()
        d = self.element_spacing_m
        row_off = (np.arange(self.n_rows) - (self.n_rows - 1) / 2.0) * d
        col_off = (np.arange(self.n_cols) - (self.n_cols - 1) / 2.0) * d
        grid = row_off[:, None, None] * up + col_off[None, :, None] * left
        return (self.position + grid).reshape(-1, 3)


@dataclass(frozen=True, eq=False)
class Route:
    """Straight aerial corridor through the scenario center, discretized
    into equidistant waypoints at a fixed altitude."""

    rotation_deg: float
    waypoints: np.ndarray           # (n_waypoints, 3)

    @property
    def n_waypoints(self) -> int:
        return self.waypoints.shape[0]

    @property
    def altitude_m(self) -> float:
        return float(self.waypoints[0, 2])

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.waypoints[0] + self.waypoints[-1])


@dataclass(frozen=True, eq=False)
class DropPlacement:
    """Random UE positions of one drop."""

    gue_positions: np.ndarray       # (n_gue_total, 3)
    ccuav_positions: np.ndarray     # (n_ccuav, 3), a subset of route waypoints
    ccuav_start_index: int


@dataclass(frozen=True, eq=False)
class Scenario:
    """Immutable experiment geometry: sectors plus the route fan."""

    config: ScenarioConfig
    sectors: tuple[SectorGeometry, ...]
    routes: tuple[Route, ...]

    def route_by_rotation(self, rotation_deg: float, tol: float = 1e-6) -> Route:
        for route in self.routes:
            if abs(route.rotation_deg - rotation_deg) <= tol:
                return route
        raise ConfigurationError(
            f"no route with rotation {rotation_deg:g} deg; "
            f"available: {[r.rotation_deg for r in self.routes]}"
        )


def _bearing_to_xy(bearing_deg: float, radius: float) -> tuple[float, float]:
    b = np.radians(bearing_deg)
    return radius * float(np.sin(b)), radius * float(np.cos(b))


def build_sectors(config: ScenarioConfig) -> list[SectorGeometry]:
    """Place sectors on a ring around the center, boresights aimed inward.

    The three-sector default uses the south/west/north-east bearings; any
    other count falls back to an evenly spaced ring starting at south.
    """
    config.validate()
    if config.n_sectors == 3:
        bearings = DEFAULT_THREE_SECTOR_BEARINGS
        names = DEFAULT_THREE_SECTOR_NAMES
    else:
        step = 360.0 / config.n_sectors
        bearings = tuple(180.0 + i * step for i in range(config.n_sectors))
        names = tuple(f"MS_{i:02d}" for i in range(config.n_sectors))

    sectors = []
    for name, bearing in zip(names, bearings):
        x, y = _bearing_to_xy(bearing, config.sector_ring_radius_m)
        position = np.array([x, y, config.sector_height_m])
        azimuth = float(np.arctan2(-y, -x))  # horizontal direction toward center
        sectors.append(
            SectorGeometry(
                name=name,
                position=position,
                boresight_azimuth_rad=azimuth,
                downtilt_rad=float(np.radians(config.panel_downtilt_deg)),
                n_rows=config.panel_rows,
                n_cols=config.panel_cols,
                element_spacing_m=config.design_wavelength_m / 2.0,
            )
        )
    return sectors


def build_routes(config: ScenarioConfig) -> list[Route]:
    """Create the route fan: one straight corridor per rotation step.

    Waypoints are spaced exactly ``waypoint_spacing_m`` apart and centered on
    the scenario midpoint, so the end-to-end span is
    ``(n_waypoints - 1) * waypoint_spacing_m``.
    """
    config.validate()
    total_angle = config.route_rotation_step_deg * config.n_routes
    if total_angle > 180.0 + 1e-9:
        warnings.warn(
            f"route fan covers {total_angle:g} deg > 180 deg; "
            "routes duplicate each other by symmetry",
            stacklevel=2,
        )
    n_w = config.n_waypoints
    offsets = (np.arange(n_w) - (n_w - 1) / 2.0) * config.waypoint_spacing_m
    routes = []
    for k in range(config.n_routes):
        rotation = k * config.route_rotation_step_deg
        phi = np.radians(rotation)
        direction = np.array([np.cos(phi), np.sin(phi), 0.0])
        waypoints = offsets[:, None] * direction
        waypoints[:, 2] = config.aerial_altitude_m
        routes.append(Route(rotation_deg=rotation, waypoints=waypoints))
    return routes


def build_scenario(config: ScenarioConfig) -> Scenario:
    return Scenario(
        config=config,
        sectors=tuple(build_sectors(config)),
        routes=tuple(build_routes(config)),
    )


def ccuav_index_step(config: ScenarioConfig) -> int:
    """Waypoint-index stride between swarm members; must divide evenly."""
    step = config.ccuav_spacing_m / config.waypoint_spacing_m
    if abs(step - round(step)) > 1e-9:
        raise ConfigurationError(
            f"ccuav_spacing_m ({config.ccuav_spacing_m:g}) must be an integer "
            f"multiple of waypoint_spacing_m ({config.waypoint_spacing_m:g})"
        )
    return int(round(step))


def place_drop(
    config: ScenarioConfig, route: Route, rng: np.random.Generator
) -> DropPlacement:
    """Placement of one drop.

    gUEs are uniform over the disk of ring radius around the center.  The
    CCUAV swarm occupies consecutive waypoints at the configured stride;
    with ``ccuav_placement = "centered"`` (default) it sits symmetrically
    around the route midpoint, with ``"uniform"`` its start waypoint is
    drawn uniformly over all feasible offsets.  Draw order (gUE radii, gUE
    angles, swarm start) is fixed and part of the reproducibility contract.
    """
    n_gue = config.n_gue_total
    radius = config.sector_ring_radius_m
    r = radius * np.sqrt(rng.random(n_gue))
    theta = 2.0 * np.pi * rng.random(n_gue)
    gue = np.column_stack(
        [r * np.cos(theta), r * np.sin(theta), np.full(n_gue, config.gue_height_m)]
    )

    step = ccuav_index_step(config)
    span = (config.n_ccuav - 1) * step
    max_start = route.n_waypoints - 1 - span
    if max_start < 0:
        raise ConfigurationError(
            f"swarm of {config.n_ccuav} CCUAVs at stride {step} does not fit on "
            f"a route of {route.n_waypoints} waypoints"
        )
    if config.ccuav_placement == "uniform":
        start = int(rng.integers(0, max_start + 1))
    else:
        start = max_start // 2
    indices = start + step * np.arange(config.n_ccuav)
    return DropPlacement(
        gue_positions=gue,
        ccuav_positions=route.waypoints[indices].copy(),
        ccuav_start_index=start,
    )
