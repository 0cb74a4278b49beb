"""Cell-selection metrics and the argmax selection rule.

Three metrics are supported for aerial UEs: plain strongest-RSRP, a
weighted sum of min-max-normalized route score and RSRP ("m1"), and a
capacity-style product of route score and log spectral efficiency ("m2").
Ground UEs always attach to the strongest-RSRP sector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import METRIC_NAMES
from .errors import ConfigurationError


def _normalize_to_max(values: np.ndarray, bounds: tuple[float, float] | None) -> np.ndarray:
    """(v - max) / (max - min) per row; a degenerate max == min maps to 0."""
    v = np.asarray(values, dtype=float)
    if bounds is not None:
        lo, hi = float(bounds[0]), float(bounds[1])
    else:
        lo = v.min(axis=-1, keepdims=True)
        hi = v.max(axis=-1, keepdims=True)
    span = hi - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(span > 0, (v - hi) / span, 0.0)
    return out


def metric_rsrp(rsrp_dbm: np.ndarray) -> np.ndarray:
    """Identity score: the argmax is the strongest sector."""
    return np.array(rsrp_dbm, dtype=float)


def metric_m1(
    scores: np.ndarray,
    rsrp_dbm: np.ndarray,
    alpha: float,
    score_bounds: tuple[float, float] | None = None,
    rsrp_bounds: tuple[float, float] | None = None,
) -> np.ndarray:
    """Weighted sum of normalized route score and normalized RSRP.

    Both terms are normalized to [-1, 0] against their own extrema (or
    fixed bounds when given), so the best candidate of each term scores 0.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ConfigurationError("alpha must lie in [0, 1]")
    es_term = _normalize_to_max(np.asarray(scores, dtype=float), score_bounds)
    rsrp_term = _normalize_to_max(rsrp_dbm, rsrp_bounds)
    return alpha * es_term + (1.0 - alpha) * rsrp_term


def metric_m2(scores: np.ndarray, rsrp_dbm: np.ndarray, noise_mw: float) -> np.ndarray:
    """Capacity-style score: route score times log2(1 + SNR), with the SNR
    taken as the linear RSRP over the given noise reference."""
    if noise_mw <= 0:
        raise ValueError("noise reference must be positive")
    snr = 10.0 ** (np.asarray(rsrp_dbm, dtype=float) / 10.0) / noise_mw
    return np.asarray(scores, dtype=float) * np.log2(1.0 + snr)


@dataclass(frozen=True, eq=False)
class SelectionInput:
    """Per-UE RSRP rows plus the per-route score vector, aligned on sectors."""

    rsrp_dbm: np.ndarray            # (n_ue, n_sectors)
    scores: np.ndarray              # (n_sectors,) route scores
    alpha: float
    noise_mw: float


@dataclass(frozen=True, eq=False)
class SelectionOutcome:
    metric: str
    chosen: np.ndarray              # (n_ue,) sector indices
    metric_values: np.ndarray       # (n_ue, n_sectors)


def select_cell(metric: str, selection_input: SelectionInput) -> SelectionOutcome:
    """Argmax selection with lowest-index tie-break."""
    if metric not in METRIC_NAMES:
        raise ConfigurationError(f"unknown metric {metric!r}; expected one of {METRIC_NAMES}")
    rsrp = np.atleast_2d(np.asarray(selection_input.rsrp_dbm, dtype=float))
    if metric == "rsrp":
        values = metric_rsrp(rsrp)
    elif metric == "m1":
        values = metric_m1(selection_input.scores, rsrp, selection_input.alpha)
    else:
        values = metric_m2(selection_input.scores, rsrp, selection_input.noise_mw)
    chosen = np.argmax(values, axis=-1)
    return SelectionOutcome(metric=metric, chosen=chosen, metric_values=values)
