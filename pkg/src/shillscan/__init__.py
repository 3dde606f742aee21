"""shillscan: fake-profile rating-burst detection for recommender logs.

The pipeline per item: build the rating history, split it into time
windows at recursively-chosen maximal gaps, compare every window pair
with a modified two-sample T statistic, and flag the windows (and the
extreme ratings inside them) that look like an injected burst.
"""

from .attacks import (
    AttackConfig,
    InjectionRecord,
    generate_attack,
    inject,
    most_rated_item,
    read_injection_record,
    write_injection_record,
)
from .data import (
    Dataset,
    GapSeries,
    LogParseError,
    RatingAction,
    RatingHistory,
    UndefinedGapSeriesError,
    build_gap_series,
    filter_sparse_items,
    load_dataset,
    parse_rating_log,
    save_dataset,
    write_rating_log,
)
from .detect import (
    CRITICAL_VALUES,
    DetectionReport,
    PairResult,
    PairwiseFlagMatrix,
    WindowStats,
    critical_value,
    detect_abnormal_windows,
    detect_item,
    extract_abnormal_ratings,
    flag_matrix,
    t_statistic,
    window_stats,
)
from .evaluate import (
    EvalReport,
    ExperimentProtocol,
    SweepRow,
    classify_items,
    detection_rate,
    false_alarm_rate,
    run_experiment,
    sweep_alpha,
    sweep_protocol,
    write_eval_csv,
    write_eval_json,
    write_sweep_csv,
    write_sweep_json,
)
from .segment import (
    PartitionConfig,
    TimeWindow,
    WindowPartition,
    hours_to_seconds,
    partition_history,
)
from .synth import make_synthetic_dataset

__version__ = "0.1.0"

__all__ = [
    "AttackConfig",
    "CRITICAL_VALUES",
    "Dataset",
    "DetectionReport",
    "EvalReport",
    "ExperimentProtocol",
    "GapSeries",
    "InjectionRecord",
    "LogParseError",
    "PairResult",
    "PairwiseFlagMatrix",
    "PartitionConfig",
    "RatingAction",
    "RatingHistory",
    "SweepRow",
    "TimeWindow",
    "UndefinedGapSeriesError",
    "WindowPartition",
    "WindowStats",
    "build_gap_series",
    "classify_items",
    "critical_value",
    "detect_abnormal_windows",
    "detect_item",
    "detection_rate",
    "extract_abnormal_ratings",
    "false_alarm_rate",
    "filter_sparse_items",
    "flag_matrix",
    "generate_attack",
    "hours_to_seconds",
    "inject",
    "load_dataset",
    "make_synthetic_dataset",
    "most_rated_item",
    "parse_rating_log",
    "partition_history",
    "read_injection_record",
    "run_experiment",
    "save_dataset",
    "sweep_alpha",
    "sweep_protocol",
    "t_statistic",
    "window_stats",
    "write_eval_csv",
    "write_eval_json",
    "write_injection_record",
    "write_rating_log",
    "write_sweep_csv",
    "write_sweep_json",
]
