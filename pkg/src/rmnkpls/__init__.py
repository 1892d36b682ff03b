"""rho-MNK landscapes, Pareto local search with bounded archiving, exact
quality indicators against enumerated fronts, and an experiment harness."""

from .archivers import (
    ARCHIVER_NAMES,
    AddResult,
    archiver_add,
    discretize,
    hv_contribution,
    hva_add,
    mga_add,
    unbounded_add,
)
from .bench import (
    ExperimentMatrix,
    MatrixResult,
    RunRecord,
    SummaryRow,
    Task,
    aggregate,
    derive_instance_seed,
    emit_plot_data,
    expand_matrix,
    matrix_instance_params,
    read_records_csv,
    run_matrix,
    write_records_csv,
)
from .indicators import hvr, hypervolume, mult_epsilon
from .landscape import (
    Instance,
    InstanceParams,
    bits_to_str,
    evaluate,
    generate_instance,
    neighbors,
    read_instance,
    sample_correlated_uniforms,
    str_to_bits,
    write_instance,
)
from .oracle import (
    EnumerationResult,
    census_plo_solutions,
    enumerate_space,
    is_maximal_plo_set,
    is_plo_set,
)
from .pareto import Archive, ArchiveEntry, Dominance, compare, nondominated_filter, weakly_dominates
from .pls import PlsConfig, RunStats, build_lookup, pls_run, select_unvisited
from .rng import SplitMix64

__version__ = "0.1.0"
