"""rankforge: what-if analysis for multi-criteria ranking systems.

The pipeline: describe a ranking system (attributes, indicator groups,
weights), fit a bootstrap-linear ensemble on historical submissions,
enumerate candidate-submission scenarios with prediction uncertainty,
quantify attribute-to-indicator influence by perturbation, and compare
win probabilities against rival rankees.
"""

from .core import (
    FINAL,
    AttributeSpec,
    IndicatorSpec,
    RankeeRecord,
    RankingSystemSpec,
    RelativeChange,
    aggregate_final_score,
    rank_entities,
    relative_change,
)
from .data_io import (
    HistoryTable,
    Session,
    SyntheticConfig,
    apply_filter_log,
    evaluate_session,
    generate_synthetic,
    load_history,
    load_session,
    load_spec,
    new_session,
    save_session,
    save_spec,
    write_history,
)
from .errors import (
    CapacityError,
    ContractError,
    DomainBoundsError,
    NoBaselineError,
    RankforgeError,
    RivalMethodError,
    SchemaError,
    SessionError,
    TrainingError,
    ValidationError,
)
from .influence import (
    InfluenceMatrix,
    attribute_influence,
    build_matrix,
    default_delta_policy,
    main_influencer,
)
from .predictor import (
    EnsembleModel,
    EnsemblePrediction,
    fit,
    predict_final,
    predict_indicator,
    predict_rank,
)
from .rival import (
    RIVAL_METHODS,
    RivalMethod,
    ScoreDistribution,
    WinProbabilityCell,
    default_methods,
    heatmap,
    predict_rival,
    radar_data,
    score_distribution,
    win_probability,
)
from .scenarios import (
    AttributeRange,
    HistogramSummary,
    Scenario,
    ScenarioFilter,
    Subject,
    filter_scenarios,
    generate_scenarios,
    parse_filter,
    parse_subject,
    scenario_summary,
    sort_scenarios,
    summarize,
    uncertainty_band,
)

__version__ = "0.1.0"
