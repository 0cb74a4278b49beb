"""Zero-forcing precoding and per-UE link budgets.

Each sector precodes over the small-scale channel matrix of its served UEs;
large-scale gains scale the resulting powers.  Power convention: the
per-PRB transmit budget is 1 and is shared equally, so every precoding
column has squared norm 1/N for N served UEs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, SingularChannelError

CONDITION_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class SectorLoad:
    """Per-drop serving state of one sector."""

    name: str
    ue_ids: tuple[int, ...]
    channel_matrix: np.ndarray      # (n_served, n_elements)
    precoder: np.ndarray            # (n_elements, n_served)

    @property
    def n_served(self) -> int:
        return len(self.ue_ids)


@dataclass(frozen=True)
class LinkBudget:
    useful_mw: float
    intra_mw: float
    inter_mw: float
    noise_mw: float

    @property
    def sinr(self) -> float:
        return self.useful_mw / (self.intra_mw + self.inter_mw + self.noise_mw)

    @property
    def sinr_db(self) -> float:
        return 10.0 * float(np.log10(self.sinr))


def zf_precoder(channel_matrix: np.ndarray, sector: str | None = None) -> np.ndarray:
    """Zero-forcing precoder with equal per-UE power shares.

    W = H^H (H H^H)^-1, column-rescaled so ||w_u||^2 = 1/N.  H W stays
    diagonal with positive real diagonal, so the matrix rows must be the
    channels as they appear in the receive equation (i.e. row u is h_u^H
    when the received symbol is h_u^H w).  Raises when the Gram matrix is
    numerically singular or when N exceeds the antenna count.
    """
    h = np.asarray(channel_matrix)
    if h.ndim != 2:
        raise ValueError("channel matrix must be 2-D")
    n, m = h.shape
    if n > m:
        raise CapacityError(
            f"cannot zero-force {n} UEs with {m} antennas"
            + (f" in sector {sector}" if sector else "")
        )
    gram = h @ h.conj().T
    if np.linalg.cond(gram) > CONDITION_LIMIT:
        raise SingularChannelError(
            "channel Gram matrix numerically singular"
            + (f" in sector {sector}" if sector else "")
        )
    raw = h.conj().T @ np.linalg.inv(gram)
    norms = np.linalg.norm(raw, axis=0)
    return raw / (norms * np.sqrt(n))


def useful_power_mw(beta_mw: float, channel: np.ndarray, precoding_vector: np.ndarray) -> float:
    """beta * |h^H w|^2."""
    return float(beta_mw) * float(np.abs(np.vdot(channel, precoding_vector)) ** 2)


def interference_mw(
    ue_channels: np.ndarray,
    betas_mw: np.ndarray,
    serving_index: int,
    serving_column: int,
    loads: list[SectorLoad] | tuple[SectorLoad, ...],
) -> tuple[float, float]:
    """(intra-cell, inter-cell) interference power for one UE.

    ``ue_channels[b]`` is the UE's channel toward sector ``b``; intra-cell
    interference is the serving sector's leakage onto the UE from the other
    served streams, inter-cell is the full beam power of every other sector.
    """
    intra = 0.0
    inter = 0.0
    for b, load in enumerate(loads):
        if load.n_served == 0:
            continue
        proj = ue_channels[b].conj() @ load.precoder
        power = float(np.sum(np.abs(proj) ** 2))
        if b == serving_index:
            own = float(np.abs(proj[serving_column]) ** 2)
            intra = float(betas_mw[b]) * max(power - own, 0.0)
        else:
            inter += float(betas_mw[b]) * power
    return intra, inter


def thermal_noise_mw(bandwidth_hz: float = 180e3, noise_figure_db: float = 9.0) -> float:
    """Receiver thermal noise power over a given bandwidth."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    dbm = -174.0 + 10.0 * np.log10(bandwidth_hz) + noise_figure_db
    return float(10.0 ** (dbm / 10.0))


def sinr(useful_mw: float, intra_mw: float, inter_mw: float, noise_mw: float) -> float:
    if noise_mw <= 0:
        raise ValueError("noise power must be positive")
    if min(useful_mw, intra_mw, inter_mw) < 0:
        raise ValueError("powers must be non-negative")
    return useful_mw / (intra_mw + inter_mw + noise_mw)
