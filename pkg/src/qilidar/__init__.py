"""Quantum vs classical illumination detection and rangefinding with click detectors."""

from .errors import (
    ConfigError,
    DegenerateRegimeError,
    GaussianRegimeError,
    IndistinguishableError,
    ParameterError,
    QiLidarError,
)
from .llv_stats import (
    GaussianMoments,
    LlvCoefficients,
    LlvDistributionPair,
    Regime,
    RocCurve,
    RocPoint,
    average_distinguishability,
    detection_probabilities,
    discrepancy_ok,
    distinguishability,
    fom_crlb,
    fom_snr,
    gaussian_regime_ok,
    llv_coefficients,
    llv_moments,
    llv_value,
    quantum_advantage,
    roc_curve,
    shots_to_threshold,
)
from .quantum_optics import (
    ChannelParams,
    ClickProbabilities,
    DetectorParams,
    SourceKind,
    SourceParams,
    click_probabilities,
    click_probability_coherent,
    planck_background,
    povm_noclick_weight,
)
from .rangefinder import (
    Decision,
    InspectionPlan,
    PlannedDistance,
    SampleSeries,
    TrialResult,
    build_inspection_plan,
    p_correct_curve,
    rolling_llv_shots,
    run_rangefinding_trial,
    sample_rolling_mean,
    scan_decision,
)
from .scenario import ScenarioParams
from .scene import (
    SPEED_OF_LIGHT,
    GeometryParams,
    RangeHypothesis,
    delay_shots,
    lambertian_attenuation,
    realistic_resolution,
    spatial_resolution,
    temporal_resolution,
)
from .simulator import (
    ClickStreams,
    StreamTruth,
    WindowCounts,
    count_window,
    generate_streams,
    generate_transition_streams,
    read_streams,
    sample_window_counts,
    trial_seeds,
    unpack_bits,
    write_streams,
)

__version__ = "0.1.0"
