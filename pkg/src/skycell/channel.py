"""Large-scale propagation and small-scale fading for UE-sector links.

Ground UEs follow the 3GPP TR 38.901 urban-macro (UMa) models; aerial UEs
follow the TR 36.777 UMa-AV extensions.  Shadowing is a 2D spatially
correlated lognormal field realized with a sum-of-sinusoids construction
whose wavenumber spectrum matches an exponential autocorrelation
exp(-d / d_corr).

All dB quantities are plain floats; linear power quantities are mW.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .config import LIGHT_SPEED_M_S
from .geometry import SectorGeometry

GUE = "gue"
CCUAV = "ccuav"

#: Single-element radiation pattern: peak gain, half-power beamwidths and
#: side-lobe floors of the standard TR 38.901 element.
ELEMENT_PEAK_GAIN_DBI = 8.0
ELEMENT_HPBW_DEG = 65.0
ELEMENT_FLOOR_DB = 30.0


# ---------------------------------------------------------------------------
# LoS probability
# ---------------------------------------------------------------------------

def _los_probability_uma_ground(d_2d: np.ndarray, ue_height: float) -> np.ndarray:
    # TR 38.901 Table 7.4.2-1, UMa outdoor UEs.
    if ue_height > 23.0:
        warnings.warn(
            f"ground UE height {ue_height:g} m above UMa validity (23 m); clamping",
            stacklevel=3,
        )
        ue_height = 23.0
    if ue_height <= 13.0:
        c = 0.0
    else:
        c = ((ue_height - 13.0) / 10.0) ** 1.5
    d = np.asarray(d_2d, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        base = 18.0 / d + np.exp(-d / 63.0) * (1.0 - 18.0 / d)
        boost = 1.0 + c * 1.25 * (d / 100.0) ** 3 * np.exp(-d / 150.0)
        p = np.where(d <= 18.0, 1.0, base * boost)
    return np.minimum(p, 1.0)


def _los_probability_uma_aerial(d_2d: np.ndarray, ue_height: float) -> np.ndarray:
    # TR 36.777 Table B-1, UMa-AV.  At and above 100 m the link is always
    # line-of-sight; below 22.5 m the ground formula applies.
    if ue_height <= 22.5:
        return _los_probability_uma_ground(d_2d, ue_height)
    d = np.asarray(d_2d, dtype=float)
    if ue_height >= 100.0:
        return np.ones_like(d)
    if ue_height > 300.0:
        warnings.warn(
            f"aerial UE height {ue_height:g} m above UMa-AV validity; clamping",
            stacklevel=3,
        )
        ue_height = 300.0
    d1 = max(460.0 * np.log10(ue_height) - 700.0, 18.0)
    p1 = 4300.0 * np.log10(ue_height) - 3800.0
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(d <= d1, 1.0, d1 / d + np.exp(-d / p1) * (1.0 - d1 / d))
    return np.minimum(p, 1.0)


def los_probability(kind: str, d_2d_m, ue_height_m: float):
    """Line-of-sight probability of a link.

    ``kind`` is ``"gue"`` (urban-macro ground UE) or ``"ccuav"`` (aerial
    UE).  Accepts scalar or array 2D distances; returns the same shape.
    """
    if kind == GUE:
        p = _los_probability_uma_ground(d_2d_m, ue_height_m)
    elif kind == CCUAV:
        p = _los_probability_uma_aerial(d_2d_m, ue_height_m)
    else:
        raise ValueError(f"unknown UE kind {kind!r}")
    return float(p) if np.isscalar(d_2d_m) else p


# ---------------------------------------------------------------------------
# Path loss
# ---------------------------------------------------------------------------

def _breakpoint_distance(bs_height: float, ue_height: float, fc_hz: float) -> float:
    # Effective environment height 1 m (valid for the street-level UE
    # heights used here).
    return 4.0 * (bs_height - 1.0) * (ue_height - 1.0) * fc_hz / LIGHT_SPEED_M_S


def _pl_uma_los(d_3d, d_2d, fc_ghz: float, bs_height: float, ue_height: float):
    d_bp = _breakpoint_distance(bs_height, ue_height, fc_ghz * 1e9)
    near = 28.0 + 22.0 * np.log10(d_3d) + 20.0 * np.log10(fc_ghz)
    far = (
        28.0
        + 40.0 * np.log10(d_3d)
        + 20.0 * np.log10(fc_ghz)
        - 9.0 * np.log10(d_bp**2 + (bs_height - ue_height) ** 2)
    )
    return np.where(d_2d <= d_bp, near, far)


def _pl_uma_nlos(d_3d, d_2d, fc_ghz: float, bs_height: float, ue_height: float):
    los = _pl_uma_los(d_3d, d_2d, fc_ghz, bs_height, ue_height)
    nlos = 13.54 + 39.08 * np.log10(d_3d) + 20.0 * np.log10(fc_ghz) - 0.6 * (ue_height - 1.5)
    return np.maximum(los, nlos)


def _pl_uma_av_los(d_3d, fc_ghz: float):
    # TR 36.777 Table B-2, aerial UE between 22.5 m and 300 m.
    return 28.0 + 22.0 * np.log10(d_3d) + 20.0 * np.log10(fc_ghz)


def _pl_uma_av_nlos(d_3d, fc_ghz: float, ue_height: float):
    return (
        -17.5
        + (46.0 - 7.0 * np.log10(ue_height)) * np.log10(d_3d)
        + 20.0 * np.log10(40.0 * np.pi * fc_ghz / 3.0)
    )


def path_loss_db(
    kind: str,
    los: bool,
    d_3d_m,
    fc_hz: float,
    bs_height_m: float,
    ue_height_m: float,
):
    """Path loss in dB.  The 2D distance needed by the breakpoint test is
    recovered from the 3D distance and the endpoint heights."""
    d_3d = np.asarray(d_3d_m, dtype=float)
    if np.any(d_3d <= 0.0):
        raise ValueError("path loss undefined at zero distance")
    dh = bs_height_m - ue_height_m
    d_2d = np.sqrt(np.maximum(d_3d**2 - dh**2, 0.0))
    fc_ghz = fc_hz / 1e9
    if kind == GUE or (kind == CCUAV and ue_height_m <= 22.5):
        pl = (
            _pl_uma_los(d_3d, d_2d, fc_ghz, bs_height_m, ue_height_m)
            if los
            else _pl_uma_nlos(d_3d, d_2d, fc_ghz, bs_height_m, ue_height_m)
        )
    elif kind == CCUAV:
        pl = (
            _pl_uma_av_los(d_3d, fc_ghz)
            if los
            else _pl_uma_av_nlos(d_3d, fc_ghz, ue_height_m)
        )
    else:
        raise ValueError(f"unknown UE kind {kind!r}")
    return float(pl) if np.isscalar(d_3d_m) else pl


def path_gain(kind: str, los: bool, d_3d_m, fc_hz: float, bs_height_m: float, ue_height_m: float):
    """Linear path gain 10^(-PL/10)."""
    return 10.0 ** (-np.asarray(path_loss_db(kind, los, d_3d_m, fc_hz, bs_height_m, ue_height_m)) / 10.0)


# ---------------------------------------------------------------------------
# Shadow fading parameters and correlated field
# ---------------------------------------------------------------------------

def shadow_parameters(kind: str, los: bool, ue_height_m: float) -> tuple[float, float]:
    """(sigma_dB, decorrelation distance m) for a link class."""
    if kind == CCUAV and ue_height_m > 22.5:
        if los:
            return 4.64 * float(np.exp(-0.0066 * ue_height_m)), 30.0
        return 6.0, 30.0
    return (4.0, 37.0) if los else (6.0, 50.0)


@dataclass(frozen=True, eq=False)
class ShadowField:
    """One realization of a 2D correlated Gaussian shadowing field (dB).

    The field is a sum of ``n`` plane-wave sinusoids with random phases and
    isotropic random wave vectors whose magnitudes are drawn from the radial
    spectrum of an exponential autocorrelation with distance ``d_corr_m``.
    Sampling is a pure function of position.
    """

    wave_vectors: np.ndarray        # (n, 2) rad/m
    phases: np.ndarray              # (n,)
    amplitude: float                # sigma * sqrt(2 / n)
    sigma_db: float
    d_corr_m: float

    def sample(self, positions: np.ndarray) -> np.ndarray:
        """Shadowing in dB at the given (..., 2+) positions (x, y used)."""
        pos = np.asarray(positions, dtype=float)
        scalar = pos.ndim == 1
        xy = np.atleast_2d(pos)[:, :2]
        values = self.amplitude * np.cos(xy @ self.wave_vectors.T + self.phases).sum(axis=1)
        return float(values[0]) if scalar else values


def build_shadow_field(
    sigma_db: float,
    d_corr_m: float,
    n_sinusoids: int,
    rng: np.random.Generator,
) -> ShadowField:
    """Draw a new shadow-field realization.

    Wavenumber magnitudes invert the radial CDF F(k) = 1 - 1/sqrt(1 + (k d)^2)
    of the 2D spectral density matching exp(-d / d_corr); directions and
    phases are uniform.
    """
    u = rng.random(n_sinusoids)
    k_mag = np.sqrt(1.0 / (1.0 - u) ** 2 - 1.0) / d_corr_m
    ang = 2.0 * np.pi * rng.random(n_sinusoids)
    phases = 2.0 * np.pi * rng.random(n_sinusoids)
    wave_vectors = k_mag[:, None] * np.column_stack([np.cos(ang), np.sin(ang)])
    amplitude = sigma_db * np.sqrt(2.0 / n_sinusoids)
    return ShadowField(
        wave_vectors=wave_vectors,
        phases=phases,
        amplitude=float(amplitude),
        sigma_db=sigma_db,
        d_corr_m=d_corr_m,
    )


# ---------------------------------------------------------------------------
# Antenna element gain
# ---------------------------------------------------------------------------

def element_gain_dbi(sector: SectorGeometry, ue_positions: np.ndarray):
    """Single-element gain toward each position, in dBi.

    Standard pattern: 8 dBi peak, 65 deg half-power beamwidths, 30 dB
    side-lobe floors, evaluated in the panel's local angles (so downtilt
    shifts the pattern).
    """
    pos = np.asarray(ue_positions, dtype=float)
    scalar = pos.ndim == 1
    pos2 = np.atleast_2d(pos)
    rel = pos2 - sector.position
    norms = np.linalg.norm(rel, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("UE position coincides with the sector site")
    basis = sector.local_basis()
    local = rel @ basis.T  # columns: boresight, left, up
    zenith = np.degrees(np.arccos(np.clip(local[:, 2] / norms, -1.0, 1.0)))
    azimuth = np.degrees(np.arctan2(local[:, 1], local[:, 0]))
    a_v = np.minimum(12.0 * ((zenith - 90.0) / ELEMENT_HPBW_DEG) ** 2, ELEMENT_FLOOR_DB)
    a_h = np.minimum(12.0 * (azimuth / ELEMENT_HPBW_DEG) ** 2, ELEMENT_FLOOR_DB)
    att = np.minimum(a_v + a_h, ELEMENT_FLOOR_DB)
    gains = ELEMENT_PEAK_GAIN_DBI - att
    return float(gains[0]) if scalar else gains


# ---------------------------------------------------------------------------
# Small-scale channel
# ---------------------------------------------------------------------------

def steering_vector(sector: SectorGeometry, ue_positions: np.ndarray, wavelength_m: float):
    """Unit-modulus per-element carrier phases for a point source.

    Uses the exact distance from the source to every panel element, so near
    -field curvature is represented.  Shape: (..., n_elements).
    """
    pos = np.asarray(ue_positions, dtype=float)
    scalar = pos.ndim == 1
    pos2 = np.atleast_2d(pos)
    elements = sector.element_positions()
    d = np.linalg.norm(pos2[:, None, :] - elements[None, :, :], axis=2)
    if np.any(d == 0.0):
        raise ValueError("UE position coincides with an antenna element")
    phases = np.exp(2j * np.pi * d / wavelength_m)
    return phases[0] if scalar else phases


def rician_power_split(k_linear: float) -> tuple[float, float]:
    """(LoS fraction, scatter fraction); the two always sum to exactly 1."""
    if k_linear < 0.0:
        raise ValueError("Rician K must be non-negative")
    nlos = 1.0 / (1.0 + k_linear)
    return 1.0 - nlos, nlos


def draw_channel(
    k_linear: float,
    steering: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """One Rician small-scale channel: deterministic LoS steering component
    plus i.i.d. unit-power complex Gaussian scatter, mixed by the K factor."""
    los_frac, nlos_frac = rician_power_split(k_linear)
    shape = np.shape(steering)
    g = rng.standard_normal(shape + (2,))
    scatter = (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0)
    return np.sqrt(los_frac) * np.asarray(steering) + np.sqrt(nlos_frac) * scatter


# ---------------------------------------------------------------------------
# Large-scale link budget
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LargeScale:
    """Large-scale state of one UE-sector link on one PRB."""

    los: bool
    path_loss_db: float
    shadow_db: float
    element_gain_dbi: float
    rician_k_linear: float
    tx_power_dbm: float

    @property
    def path_gain(self) -> float:
        return 10.0 ** (-self.path_loss_db / 10.0)

    @property
    def shadow_gain(self) -> float:
        return 10.0 ** (self.shadow_db / 10.0)

    @property
    def element_gain(self) -> float:
        return 10.0 ** (self.element_gain_dbi / 10.0)

    @property
    def beta_dbm(self) -> float:
        """Received per-PRB power before beamforming, dBm."""
        return self.tx_power_dbm + self.element_gain_dbi - self.path_loss_db + self.shadow_db

    @property
    def beta_mw(self) -> float:
        return 10.0 ** (self.beta_dbm / 10.0)


def rsrp_dbm(large_scale: LargeScale) -> float:
    """Reference-signal received power: the wide-beam large-scale per-PRB
    power, excluding fast fading and precoding gain."""
    return large_scale.beta_dbm
