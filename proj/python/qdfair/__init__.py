"""Python bindings for the qdfair C++ core."""

from ._qdfair import (
    Archive,
    Architecture,
    ConfigError,
    DataError,
    Dataset,
    Error,
    Evaluation,
    deviation,
    evaluate,
    export_heatmap,
    forward,
    genome_length,
    heatmap,
    in_fair_zone,
    load_dataset,
    main,
    pearson,
    run,
    sample,
    scenario_names,
    tradeoff,
    train,
    write_synthetic_table,
)

__all__ = [
    "Archive",
    "Architecture",
    "ConfigError",
    "DataError",
    "Dataset",
    "Error",
    "Evaluation",
    "deviation",
    "evaluate",
    "export_heatmap",
    "forward",
    "genome_length",
    "heatmap",
    "in_fair_zone",
    "load_dataset",
    "main",
    "pearson",
    "run",
    "sample",
    "scenario_names",
    "tradeoff",
    "train",
    "write_synthetic_table",
]
