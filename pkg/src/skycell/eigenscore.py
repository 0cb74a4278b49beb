"""Route multiplexing scores from the spectrum of the route channel matrix.

For a (route, sector) pair the planning-stage channel matrix stacks one
channel row per waypoint.  Its normalized eigenvalue spectrum measures how
many distinct spatial directions the panel can resolve along the corridor;
the eigenscore counts the normalized eigenvalues above a threshold.

By default rows are the deterministic line-of-sight steering vectors, so
the score is a pure function of geometry.  An optional mode averages the
spectrum over fading realizations instead.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import draw_channel, steering_vector
from .geometry import Route, SectorGeometry

PLANNING_MODES = ("los", "rician")
SPECTRUM_NORMS = ("sum", "sum_sq")


def route_channel_matrix(
    route: Route, sector: SectorGeometry, wavelength_m: float
) -> np.ndarray:
    """(n_waypoints, n_elements) matrix of steering-vector rows."""
    return steering_vector(sector, route.waypoints, wavelength_m)


def normalized_spectrum(channel_matrix: np.ndarray, norm: str = "sum") -> np.ndarray:
    """Descending squared singular values of the matrix, normalized.

    ``norm="sum"`` divides by their sum, so the result lies in [0, 1] and
    sums to 1.  ``norm="sum_sq"`` divides by the sum of their squares
    instead (kept for comparison; not a [0, 1] normalization in general).
    """
    if norm not in SPECTRUM_NORMS:
        raise ValueError(f"norm must be one of {SPECTRUM_NORMS}")
    h = np.asarray(channel_matrix)
    sv = np.linalg.svd(h, compute_uv=False)
    lam = sv**2
    total = lam.sum() if norm == "sum" else (lam**2).sum()
    if total == 0.0:
        raise ValueError("all-zero channel matrix has no spectrum")
    return lam / total


def averaged_spectrum(
    route: Route,
    sector: SectorGeometry,
    wavelength_m: float,
    k_linear: float,
    n_draws: int,
    rng: np.random.Generator,
    norm: str = "sum",
) -> np.ndarray:
    """Spectrum averaged over Rician realizations of the route matrix."""
    steering = route_channel_matrix(route, sector, wavelength_m)
    acc = np.zeros(min(steering.shape))
    for _ in range(n_draws):
        h = draw_channel(k_linear, steering, rng)
        sv = np.linalg.svd(h, compute_uv=False)
        acc += sv**2
    total = acc.sum() if norm == "sum" else (acc**2).sum()
    if total == 0.0:
        raise ValueError("all-zero averaged spectrum")
    return acc / total


def eigenscore(spectrum: np.ndarray, threshold: float) -> int:
    """Count of normalized eigenvalues at or above the threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    return int(np.count_nonzero(np.asarray(spectrum) >= threshold))


@dataclass(frozen=True, eq=False)
class EigenscoreEntry:
    rotation_deg: float
    sector_name: str
    spectrum: np.ndarray
    score: int


@dataclass(frozen=True, eq=False)
class EigenscoreTable:
    """Scores and spectra for every (route, sector) pair of a scenario."""

    entries: tuple[EigenscoreEntry, ...]
    threshold: float
    sector_names: tuple[str, ...]

    def score(self, rotation_deg: float, sector_name: str) -> int:
        for e in self.entries:
            if e.sector_name == sector_name and abs(e.rotation_deg - rotation_deg) <= 1e-9:
                return e.score
        raise KeyError((rotation_deg, sector_name))

    def score_vector(self, rotation_deg: float) -> np.ndarray:
        """Scores of one route over all sectors, in sector order."""
        return np.array(
            [self.score(rotation_deg, name) for name in self.sector_names], dtype=int
        )


def eigenscore_sweep(
    routes,
    sectors,
    threshold: float,
    wavelength_m: float,
    planning: str = "los",
    k_linear: float | None = None,
    n_draws: int = 32,
    rng: np.random.Generator | None = None,
    norm: str = "sum",
) -> EigenscoreTable:
    """Score every (route, sector) pair.

    ``planning="los"`` (default) uses deterministic steering rows;
    ``planning="rician"`` averages spectra over ``n_draws`` fading draws and
    needs ``k_linear`` and ``rng``.
    """
    if planning not in PLANNING_MODES:
        raise ValueError(f"planning must be one of {PLANNING_MODES}")
    if planning == "rician" and (k_linear is None or rng is None):
        raise ValueError("rician planning needs k_linear and rng")
    entries = []
    for route in routes:
        for sector in sectors:
            if planning == "los":
                spec = normalized_spectrum(
                    route_channel_matrix(route, sector, wavelength_m), norm=norm
                )
            else:
                spec = averaged_spectrum(
                    route, sector, wavelength_m, k_linear, n_draws, rng, norm=norm
                )
            entries.append(
                EigenscoreEntry(
                    rotation_deg=route.rotation_deg,
                    sector_name=sector.name,
                    spectrum=spec,
                    score=eigenscore(spec, threshold),
                )
            )
    return EigenscoreTable(
        entries=tuple(entries),
        threshold=threshold,
        sector_names=tuple(s.name for s in sectors),
    )
