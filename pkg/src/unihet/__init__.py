"""Interval-order analysis of how uneven a university admission system is.

Universities are summarised by score intervals; the containment-free
left-right comparison of intervals yields a strict partial order, and the
normalized Hamming distance between the observed order and a reference
("ideal") order measures how far the system sits from a clean stratification.
"""

from .data import (
    Dataset,
    DatasetError,
    GroupSummary,
    SynthSpec,
    aggregate,
    load_csv,
    save_csv,
    summarize,
    synth,
    write_stats_csv,
)
from .ideals import (
    Cluster,
    ClusteredIdeal,
    ClusterSpec,
    DesiredIdeal,
    DesiredSpec,
    GroupRow,
    UniformIdeal,
    UniformSpec,
    clustered_ideal,
    desired_ideal,
    kmeans_1d,
    preset,
    preset_names,
    uniform_ideal,
)
from .imputation import (
    BASES,
    FORMS,
    ExclusionReport,
    FormStats,
    MissingnessSummary,
    StudentRecord,
    apply_exclusion,
    fill_missing,
    form_stats,
    missingness_summary,
)
from .orders import (
    IntervalOrder,
    ScoreInterval,
    UniversityStats,
    build_interval_order,
    exclude_below,
    hamming,
    interval_mean_std,
    interval_min_max,
)
from .report import (
    ExclusionOutcome,
    ExclusionResult,
    HeterogeneityReport,
    IdealOutcome,
    IdealResult,
    WhatIfRow,
    analyze,
    emit,
    load_report,
    plot_rows,
    real_order,
    whatif_exclusion,
    write_plot,
    write_whatif,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # orders
    "ScoreInterval",
    "UniversityStats",
    "IntervalOrder",
    "interval_mean_std",
    "interval_min_max",
    "build_interval_order",
    "hamming",
    "exclude_below",
    # ideals
    "Cluster",
    "ClusterSpec",
    "UniformSpec",
    "DesiredSpec",
    "GroupRow",
    "ClusteredIdeal",
    "UniformIdeal",
    "DesiredIdeal",
    "kmeans_1d",
    "clustered_ideal",
    "uniform_ideal",
    "desired_ideal",
    "preset",
    "preset_names",
    # imputation
    "FORMS",
    "BASES",
    "StudentRecord",
    "FormStats",
    "ExclusionReport",
    "MissingnessSummary",
    "apply_exclusion",
    "form_stats",
    "fill_missing",
    "missingness_summary",
    # data
    "Dataset",
    "DatasetError",
    "GroupSummary",
    "SynthSpec",
    "load_csv",
    "save_csv",
    "aggregate",
    "summarize",
    "synth",
    "write_stats_csv",
    # report
    "IdealOutcome",
    "IdealResult",
    "ExclusionOutcome",
    "ExclusionResult",
    "HeterogeneityReport",
    "WhatIfRow",
    "analyze",
    "whatif_exclusion",
    "emit",
    "load_report",
    "write_whatif",
    "plot_rows",
    "write_plot",
    "real_order",
]
