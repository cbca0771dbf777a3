"""Decision support for crowdtesting task management.

Incremental sampling turns a chronological report stream into
fixed-size captures; capture-recapture estimators predict the total bug
population; an ARIMA forecaster prices bug-detection objectives in
reports; and the decision layer automates task closing and quadrant
trade-off analysis. A synthetic-task generator with known ground truth
backs the evaluation harness.
"""

from .arima import (
    ArimaModel,
    ArimaParams,
    CostForecast,
    SlidingForecaster,
    WarmUpError,
    difference,
    fit,
    forecast,
    required_cost,
    undifference,
)
from .core import (
    BugArrivalTable,
    CaptureSample,
    DuplicateReportError,
    FrequencyStats,
    IncrementalSampler,
    Report,
    StreamOrderError,
)
from .crc import (
    TUNED_SMP_SIZE,
    CrcEstimate,
    EstimatorKind,
    InsufficientCapturesError,
    InsufficientDataError,
    InsufficientRecaptureError,
    estimate,
    estimate_m0,
    estimate_mhch,
    estimate_mhjk,
    estimate_mtch,
    estimate_mth,
    estimate_series,
)
from .decisions import (
    CloseCriterion,
    CloseDecision,
    TradeoffBenchmarks,
    TradeoffRegion,
    classify_tradeoff,
    evaluate_close,
    next_objective,
)
from .evaluate import (
    CHECKPOINT_LEVELS,
    CheckpointKind,
    cost_effectiveness,
    harmonic_f1,
    mann_whitney_u,
    rayleigh_fit,
    relative_error,
    run_experiment,
    tune_smp_size,
)
from .pipeline import PipelineConfig, TaskPipeline, TaskSnapshot, replay, run_task
from .simulate import (
    BetaDist,
    GroundTruth,
    LogNormalDist,
    PointDist,
    SyntheticTaskConfig,
    generate_corpus,
    generate_task,
)

__version__ = "0.1.0"
