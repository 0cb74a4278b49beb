"""Drop engine and campaign statistics.

A drop is one independent realization of placements, shadowing, LoS states
and fading.  All randomness of drop ``i`` comes from a dedicated stream
derived from ``(master_seed, i)``, and every random draw happens before the
selection metric is consulted, so different metrics evaluated on the same
(seed, drop) see identical placements and channels and results do not
depend on execution order or worker count.
"""
from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import channel as ch
from .association import SelectionInput, select_cell
from .config import ScenarioConfig
from .eigenscore import eigenscore_sweep
from .errors import CapacityError, ConfigurationError
from .geometry import DropPlacement, Route, Scenario, place_drop
from .precoding import SectorLoad, interference_mw, thermal_noise_mw, useful_power_mw, zf_precoder

#: Shadow-field classes built per sector, in construction order.
_SHADOW_CLASSES = ((ch.GUE, True), (ch.GUE, False), (ch.CCUAV, True), (ch.CCUAV, False))


def drop_rng(master_seed: int, drop_index: int) -> np.random.Generator:
    """Independent, reproducible stream for one drop."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(drop_index,)))


@dataclass(frozen=True, eq=False)
class DropState:
    """Everything random about one drop, before any selection decision.

    ``beta_dbm`` is the data-epoch large-scale budget entering the SINR;
    ``rsrp_dbm`` is the selection-stage measurement (with the measurement
    -epoch shadow when ``selection_shadow = "measurement"``).
    """

    placement: DropPlacement
    positions: np.ndarray           # (n_ue, 3); CCUAVs first, then gUEs
    kinds: tuple[str, ...]
    los: np.ndarray                 # (n_ue, n_sectors) bool
    path_loss_db: np.ndarray        # (n_ue, n_sectors)
    shadow_db: np.ndarray           # data-epoch shadow
    measurement_shadow_db: np.ndarray
    element_gain_dbi: np.ndarray
    k_linear: np.ndarray
    beta_dbm: np.ndarray
    rsrp_dbm: np.ndarray
    h: np.ndarray                   # (n_ue, n_sectors, n_elements) complex

    @property
    def beta_mw(self) -> np.ndarray:
        return 10.0 ** (self.beta_dbm / 10.0)

    @property
    def placement_hash(self) -> str:
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.positions).tobytes())
        return digest.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class DropResult:
    drop_index: int
    metric: str
    ccuav_sector: np.ndarray        # (n_ccuav,) serving sector indices
    ccuav_sinr_db: np.ndarray
    ccuav_rsrp_dbm: np.ndarray      # (n_ccuav, n_sectors)
    gue_sector: np.ndarray
    gue_sinr_db: np.ndarray
    served_counts: np.ndarray       # (n_sectors,)
    placement_hash: str
    intra_to_useful_max: float      # residual ZF leakage diagnostic


@dataclass(frozen=True, eq=False)
class CampaignStats:
    metric: str
    route_rotation_deg: float
    n_ccuav: int
    n_drops: int
    master_seed: int
    aerial_mean_sinr_db: float
    aerial_p5_sinr_db: float
    gue_mean_sinr_db: float
    per_ccuav_p5_sinr_db: np.ndarray
    selection_rates: np.ndarray     # (n_ccuav, n_sectors), rows sum to 1
    sector_names: tuple[str, ...]
    placement_digest: str
    mean_domain: str                # "db" or "linear"
    drops: tuple[DropResult, ...] | None = None


def generate_drop_state(
    scenario: Scenario, route: Route, drop_index: int, master_seed: int
) -> DropState:
    """Draw placements, fields, LoS states and channels for one drop.

    The draw order (placement, then per sector and link class a data-epoch
    and a measurement-epoch shadow field, then LoS uniforms, then scatter
    normals) is fixed; changing it changes every downstream number.  Both
    shadow epochs are always drawn so the stream layout does not depend on
    the ``selection_shadow`` mode.
    """
    config = scenario.config
    rng = drop_rng(master_seed, drop_index)
    placement = place_drop(config, route, rng)

    n_c = config.n_ccuav
    positions = np.vstack([placement.ccuav_positions, placement.gue_positions])
    kinds = tuple([ch.CCUAV] * n_c + [ch.GUE] * config.n_gue_total)
    n_ue = positions.shape[0]
    n_s = len(scenario.sectors)

    fields = {}
    meas_fields = {}
    for sector in scenario.sectors:
        for kind, los_state in _SHADOW_CLASSES:
            height = config.aerial_altitude_m if kind == ch.CCUAV else config.gue_height_m
            sigma, d_corr = ch.shadow_parameters(kind, los_state, height)
            key = (sector.name, kind, los_state)
            fields[key] = ch.build_shadow_field(
                sigma, d_corr, config.n_shadow_sinusoids, rng
            )
            meas_fields[key] = ch.build_shadow_field(
                sigma, d_corr, config.n_shadow_sinusoids, rng
            )

    los_uniform = rng.random((n_ue, n_s))
    scatter = rng.standard_normal((n_ue, n_s, config.n_elements, 2))
    scatter = (scatter[..., 0] + 1j * scatter[..., 1]) / np.sqrt(2.0)

    los = np.zeros((n_ue, n_s), dtype=bool)
    pl_db = np.zeros((n_ue, n_s))
    shadow_db = np.zeros((n_ue, n_s))
    meas_shadow_db = np.zeros((n_ue, n_s))
    gain_dbi = np.zeros((n_ue, n_s))
    k_lin = np.zeros((n_ue, n_s))
    h = np.zeros((n_ue, n_s, config.n_elements), dtype=complex)

    ccuav_slice = slice(0, n_c)
    gue_slice = slice(n_c, n_ue)
    wavelength = config.carrier_wavelength_m
    for s, sector in enumerate(scenario.sectors):
        delta = positions - sector.position
        d_3d = np.linalg.norm(delta, axis=1)
        d_2d = np.linalg.norm(delta[:, :2], axis=1)

        p_los = np.empty(n_ue)
        p_los[ccuav_slice] = ch.los_probability(
            ch.CCUAV, d_2d[ccuav_slice], config.aerial_altitude_m
        )
        p_los[gue_slice] = ch.los_probability(ch.GUE, d_2d[gue_slice], config.gue_height_m)
        los[:, s] = los_uniform[:, s] < p_los

        for kind, ue_slice, height in (
            (ch.CCUAV, ccuav_slice, config.aerial_altitude_m),
            (ch.GUE, gue_slice, config.gue_height_m),
        ):
            for los_state in (True, False):
                mask = np.zeros(n_ue, dtype=bool)
                mask[ue_slice] = los[ue_slice, s] == los_state
                if not mask.any():
                    continue
                pl_db[mask, s] = ch.path_loss_db(
                    kind, los_state, d_3d[mask], config.carrier_hz,
                    config.sector_height_m, height,
                )
                key = (sector.name, kind, los_state)
                shadow_db[mask, s] = fields[key].sample(positions[mask])
                meas_shadow_db[mask, s] = meas_fields[key].sample(positions[mask])
                k_lin[mask, s] = config.rician_k_linear if los_state else 0.0

        gain_dbi[:, s] = ch.element_gain_dbi(sector, positions)
        steering = ch.steering_vector(sector, positions, wavelength)
        nlos_frac = 1.0 / (1.0 + k_lin[:, s])
        los_frac = 1.0 - nlos_frac
        h[:, s, :] = (
            np.sqrt(los_frac)[:, None] * steering
            + np.sqrt(nlos_frac)[:, None] * scatter[:, s, :]
        )

    base_dbm = config.per_prb_power_dbm + gain_dbi - pl_db
    beta_dbm = base_dbm + shadow_db
    if config.selection_shadow == "measurement":
        rsrp = base_dbm + meas_shadow_db
    else:
        rsrp = beta_dbm
    return DropState(
        placement=placement,
        positions=positions,
        kinds=kinds,
        los=los,
        path_loss_db=pl_db,
        shadow_db=shadow_db,
        measurement_shadow_db=meas_shadow_db,
        element_gain_dbi=gain_dbi,
        k_linear=k_lin,
        beta_dbm=beta_dbm,
        rsrp_dbm=rsrp,
        h=h,
    )


def run_drop(
    scenario: Scenario,
    route: Route,
    score_vector: np.ndarray,
    metric: str,
    drop_index: int,
    master_seed: int,
) -> DropResult:
    """One full drop: placements and channels, selections, precoding, SINRs.

    ``score_vector`` is the precomputed per-sector route score used by the
    "m1"/"m2" metrics (ignored by "rsrp").
    """
    config = scenario.config
    state = generate_drop_state(scenario, route, drop_index, master_seed)
    n_c = config.n_ccuav
    n_ue = state.positions.shape[0]
    n_s = len(scenario.sectors)

    noise_mw = thermal_noise_mw(config.prb_bandwidth_hz, config.noise_figure_db)
    m2_noise = noise_mw if config.m2_snr_reference == "thermal" else 1.0

    serving = np.empty(n_ue, dtype=int)
    if n_c:
        outcome = select_cell(
            metric,
            SelectionInput(
                rsrp_dbm=state.rsrp_dbm[:n_c],
                scores=np.asarray(score_vector),
                alpha=config.alpha,
                noise_mw=m2_noise,
            ),
        )
        serving[:n_c] = outcome.chosen
    serving[n_c:] = np.argmax(state.rsrp_dbm[n_c:], axis=1)

    loads = []
    for s, sector in enumerate(scenario.sectors):
        ue_ids = tuple(int(u) for u in np.flatnonzero(serving == s))
        if len(ue_ids) > config.n_elements:
            raise CapacityError(
                f"sector {sector.name} asked to serve {len(ue_ids)} UEs "
                f"with {config.n_elements} antennas"
            )
        if ue_ids:
            # Precoding rows are the receive-side h^H, so h^H w_p nulls.
            h_b = state.h[list(ue_ids), s, :].conj()
            w_b = zf_precoder(h_b, sector=sector.name)
        else:
            h_b = np.zeros((0, config.n_elements), dtype=complex)
            w_b = np.zeros((config.n_elements, 0), dtype=complex)
        loads.append(
            SectorLoad(name=sector.name, ue_ids=ue_ids, channel_matrix=h_b, precoder=w_b)
        )

    beta_mw = state.beta_mw
    sinr_db = np.empty(n_ue)
    intra_ratio_max = 0.0
    for u in range(n_ue):
        s = int(serving[u])
        col = loads[s].ue_ids.index(u)
        useful = useful_power_mw(beta_mw[u, s], state.h[u, s], loads[s].precoder[:, col])
        intra, inter = interference_mw(state.h[u], beta_mw[u], s, col, loads)
        sinr_db[u] = 10.0 * np.log10(useful / (intra + inter + noise_mw))
        if useful > 0.0:
            intra_ratio_max = max(intra_ratio_max, intra / useful)

    return DropResult(
        drop_index=drop_index,
        metric=metric,
        ccuav_sector=serving[:n_c].copy(),
        ccuav_sinr_db=sinr_db[:n_c].copy(),
        ccuav_rsrp_dbm=state.rsrp_dbm[:n_c].copy(),
        gue_sector=serving[n_c:].copy(),
        gue_sinr_db=sinr_db[n_c:].copy(),
        served_counts=np.bincount(serving, minlength=n_s),
        placement_hash=state.placement_hash,
        intra_to_useful_max=intra_ratio_max,
    )


def _mean_db(samples: np.ndarray, linear_mean: bool) -> float:
    if samples.size == 0:
        return float("nan")
    if linear_mean:
        return 10.0 * float(np.log10(np.mean(10.0 ** (samples / 10.0))))
    return float(np.mean(samples))


def run_campaign(
    scenario: Scenario,
    route: Route,
    metric: str,
    score_vector: np.ndarray | None = None,
    threads: int | None = None,
    linear_mean: bool = False,
    collect_drops: bool = False,
) -> CampaignStats:
    """Run all configured drops for one (route, metric) and aggregate.

    Drops execute independently (optionally on a thread pool); aggregation
    is in drop-index order, so statistics are identical for any worker
    count.  The 5th percentile interpolates linearly between the closest
    order statistics of the pooled aerial SINR sample.
    """
    config = scenario.config
    if score_vector is None:
        table = eigenscore_sweep(
            [route], scenario.sectors, config.eigen_threshold, config.carrier_wavelength_m
        )
        score_vector = table.score_vector(route.rotation_deg)

    indices = range(config.n_drops)

    def one(i: int) -> DropResult:
        return run_drop(scenario, route, score_vector, metric, i, config.master_seed)

    if threads is None:
        threads = os.cpu_count() or 1
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, indices))
    else:
        results = [one(i) for i in indices]

    aerial = np.concatenate([r.ccuav_sinr_db for r in results])
    ground = np.concatenate([r.gue_sinr_db for r in results])
    per_ccuav = np.vstack([r.ccuav_sinr_db for r in results])  # (n_drops, n_ccuav)

    n_s = len(scenario.sectors)
    counts = np.zeros((config.n_ccuav, n_s))
    for r in results:
        for idx, s in enumerate(r.ccuav_sector):
            counts[idx, s] += 1
    rates = counts / config.n_drops if config.n_drops else counts

    digest = hashlib.sha256()
    for r in results:
        digest.update(r.placement_hash.encode())

    return CampaignStats(
        metric=metric,
        route_rotation_deg=route.rotation_deg,
        n_ccuav=config.n_ccuav,
        n_drops=config.n_drops,
        master_seed=config.master_seed,
        aerial_mean_sinr_db=_mean_db(aerial, linear_mean),
        aerial_p5_sinr_db=float(np.percentile(aerial, 5.0)) if aerial.size else float("nan"),
        gue_mean_sinr_db=_mean_db(ground, linear_mean),
        per_ccuav_p5_sinr_db=(
            np.percentile(per_ccuav, 5.0, axis=0) if aerial.size else np.empty(0)
        ),
        selection_rates=rates,
        sector_names=tuple(s.name for s in scenario.sectors),
        placement_digest=digest.hexdigest()[:16],
        mean_domain="linear" if linear_mean else "db",
        drops=tuple(results) if collect_drops else None,
    )


def sweep_ccuavs(
    scenario: Scenario,
    route: Route,
    metrics,
    n_values,
    threads: int | None = None,
    linear_mean: bool = False,
) -> list[CampaignStats]:
    """One campaign per (metric, swarm size); the route score is reused."""
    config = scenario.config
    table = eigenscore_sweep(
        [route], scenario.sectors, config.eigen_threshold, config.carrier_wavelength_m
    )
    scores = table.score_vector(route.rotation_deg)
    results = []
    for metric in metrics:
        for n in n_values:
            try:
                cfg_n = replace(config, n_ccuav=int(n))
            except ConfigurationError as exc:
                raise ConfigurationError(f"n_ccuav={n}: {exc}") from exc
            sub = Scenario(config=cfg_n, sectors=scenario.sectors, routes=scenario.routes)
            results.append(
                run_campaign(
                    sub, route, metric,
                    score_vector=scores, threads=threads, linear_mean=linear_mean,
                )
            )
    return results
