"""System-level simulator for mMIMO cell selection of UAV swarms flying on
predefined aerial corridors."""

__version__ = "0.1.0"

from .association import (
    SelectionInput,
    SelectionOutcome,
    metric_m1,
    metric_m2,
    metric_rsrp,
    select_cell,
)
from .channel import (
    LargeScale,
    ShadowField,
    build_shadow_field,
    draw_channel,
    element_gain_dbi,
    los_probability,
    path_gain,
    path_loss_db,
    rician_power_split,
    rsrp_dbm,
    shadow_parameters,
    steering_vector,
)
from .config import ScenarioConfig, config_as_dict, load_config
from .eigenscore import (
    EigenscoreTable,
    averaged_spectrum,
    eigenscore,
    eigenscore_sweep,
    normalized_spectrum,
    route_channel_matrix,
)
from .engine import (
    CampaignStats,
    DropResult,
    DropState,
    drop_rng,
    generate_drop_state,
    run_campaign,
    run_drop,
    sweep_ccuavs,
)
from .errors import CapacityError, ConfigurationError, SingularChannelError
from .geometry import (
    DropPlacement,
    Route,
    Scenario,
    SectorGeometry,
    build_routes,
    build_scenario,
    build_sectors,
    place_drop,
)
from .precoding import (
    LinkBudget,
    SectorLoad,
    interference_mw,
    sinr,
    thermal_noise_mw,
    useful_power_mw,
    zf_precoder,
)
