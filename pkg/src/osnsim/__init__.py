"""osnsim: generative simulation of online social-network activity.

Pipeline: ingest event logs -> extract endogenous influence (normalized
transfer entropy) and exogenous shocks (filtered anomaly masks) ->
simulate (multiplexity growth model, multi-action cascade model, or
historical replay) -> mix model output with replay for less-active
users -> evaluate against ground truth at the community, content,
population and user levels.
"""

from .events import (
    Event,
    EntityRole,
    Entity,
    ONTOLOGY,
    ONTOLOGY_VERSION,
    OntologyAction,
    PLATFORM_ACTIONS,
    Platform,
    map_platform_action,
    validate_event,
)
from .ingestion import ActivitySeries, BinarySeries, bin_activity, binarize, load_events
from .influence import (
    InfluenceNetwork,
    UserSplit,
    build_influence_network,
    normalized_te,
    snowball_sample,
    split_by_interaction_share,
    split_users,
    transfer_entropy,
)
from .exogenous import (
    AnomalyMask,
    ShockConfig,
    ShockSeries,
    build_exogenous_network,
    butterworth_response,
    detect_shocks,
)
from .mbm import MbmConfig, MultiplexityModel, NodeState, select_weighted, update_node
from .macm import (
    Inbox,
    MacmMessage,
    MultiActionCascadeModel,
    response_probability,
    update_p,
    update_q,
)
from .shd import HistoricalReplayModel, MixConfig, ReplayWindow, mix, replay
from .metrics import (
    MetricReport,
    NetworkStats,
    ape,
    burstiness,
    compare,
    evaluate,
    gini,
    js_divergence,
    ks_statistic,
    network_summary,
    palma,
    rbo,
)
from .synth import GroundTruthAnnotations, ScenarioConfig, generate, standard_scenario

__version__ = "0.1.0"

__all__ = [
    "Event", "EntityRole", "Entity", "ONTOLOGY", "ONTOLOGY_VERSION", "OntologyAction",
    "PLATFORM_ACTIONS", "Platform", "map_platform_action", "validate_event",
    "ActivitySeries", "BinarySeries", "bin_activity", "binarize", "load_events",
    "InfluenceNetwork", "UserSplit", "build_influence_network", "normalized_te",
    "snowball_sample", "split_by_interaction_share", "split_users", "transfer_entropy",
    "AnomalyMask", "ShockConfig", "ShockSeries", "build_exogenous_network",
    "butterworth_response", "detect_shocks",
    "MbmConfig", "MultiplexityModel", "NodeState", "select_weighted", "update_node",
    "Inbox", "MacmMessage", "MultiActionCascadeModel", "response_probability",
    "update_p", "update_q",
    "HistoricalReplayModel", "MixConfig", "ReplayWindow", "mix", "replay",
    "MetricReport", "NetworkStats", "ape", "burstiness", "compare", "evaluate",
    "gini", "js_divergence", "ks_statistic", "network_summary", "palma", "rbo",
    "GroundTruthAnnotations", "ScenarioConfig", "generate", "standard_scenario",
    "__version__",
]
