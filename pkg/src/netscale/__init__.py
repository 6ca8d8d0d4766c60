"""Network scaling-law analysis toolkit.

Simplify empirical networks, compute structural measures, draw matched
random-graph null ensembles, and fit power-law / logarithmic scaling laws
with bootstrap uncertainties.
"""

__version__ = "0.1.0"

from .graph import (  # noqa: E402
    ComponentPartition,
    ParseError,
    RawEdgeList,
    SimpleGraph,
    SimplifyStats,
    connected_components,
    degree_sequence,
    parse_edge_list,
    read_edge_list,
    simplify,
)
from .measures import (  # noqa: E402
    MeasureRecord,
    compute_measures,
    degree_assortativity,
    global_clustering,
    mean_degree,
    mean_geodesic_exact,
)
from .geodesic import EstimatorConfig, GeodesicEstimate, estimate_mean_geodesic  # noqa: E402
from .nullmodels import (  # noqa: E402
    BlockModelParams,
    Multigraph,
    as_maxent,
    chung_lu_sample,
    config_model_sample,
    dcsbm_generate,
    dcsbm_maxent_sample,
    dcsbm_repair,
    dcsbm_sample,
    gen_gnm,
    gen_gnp,
    maxent_params_from_graph,
    params_from_graph,
)
from .sbm import (  # noqa: E402
    InferenceRun,
    description_length,
    infer_partition,
    sample_parameter_sets,
)
from .fitting import (  # noqa: E402
    DegenerateDesignError,
    InsufficientDataError,
    NullExpectation,
    ScalingFit,
    bootstrap_sd,
    fit_logarithmic,
    fit_power_law,
    fit_with_uncertainty,
    null_expectation,
)
from .pipeline import (  # noqa: E402
    ChecksumError,
    CorpusManifest,
    ManifestEntry,
    RunConfig,
    RunResult,
    emit_plot_data,
    fetch_corpus,
    run_corpus,
    write_outputs,
)

__all__ = [
    "__version__",
    "BlockModelParams",
    "ChecksumError",
    "ComponentPartition",
    "CorpusManifest",
    "DegenerateDesignError",
    "EstimatorConfig",
    "GeodesicEstimate",
    "InferenceRun",
    "InsufficientDataError",
    "ManifestEntry",
    "MeasureRecord",
    "Multigraph",
    "NullExpectation",
    "ParseError",
    "RawEdgeList",
    "RunConfig",
    "RunResult",
    "ScalingFit",
    "SimpleGraph",
    "SimplifyStats",
    "as_maxent",
    "bootstrap_sd",
    "chung_lu_sample",
    "compute_measures",
    "config_model_sample",
    "connected_components",
    "dcsbm_generate",
    "dcsbm_maxent_sample",
    "dcsbm_repair",
    "dcsbm_sample",
    "degree_assortativity",
    "degree_sequence",
    "description_length",
    "emit_plot_data",
    "estimate_mean_geodesic",
    "fetch_corpus",
    "fit_logarithmic",
    "fit_power_law",
    "fit_with_uncertainty",
    "gen_gnm",
    "gen_gnp",
    "global_clustering",
    "infer_partition",
    "maxent_params_from_graph",
    "mean_degree",
    "mean_geodesic_exact",
    "null_expectation",
    "params_from_graph",
    "parse_edge_list",
    "read_edge_list",
    "run_corpus",
    "sample_parameter_sets",
    "simplify",
    "write_outputs",
]
