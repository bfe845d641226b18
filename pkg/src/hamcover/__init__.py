"""Hamilton-cycle covers of random graphs with ceil(Delta/2) cycles."""

from .errors import HamcoverError
from .forests import (
    ForestCollection,
    approx_linear_arboricity,
    brute_force_linear_arboricity,
    cherry_matching,
    decompose_with_core,
    konig_edge_coloring,
)
from .graph import (
    CoverCertificate,
    Graph,
    HamiltonCycle,
    LinearForest,
    build_graph,
    cover_target,
    degree_stats,
    verify_cover,
    verify_hamilton_cycle,
)
from .hamilton import (
    extend_forest_to_hamilton,
    find_hamilton_cycle,
    hamilton_path_between,
    pack_hamilton_cycles,
)
from .pipeline import PipelineConfig, brute_force_min_cover, cover, load_profile
from .random_model import SampleSpec, binomial_tail_bound, check_expansion, sample_gnp

__version__ = "0.1.0"

__all__ = [
    "CoverCertificate", "ForestCollection", "Graph", "HamcoverError", "HamiltonCycle",
    "LinearForest", "PipelineConfig", "SampleSpec", "approx_linear_arboricity",
    "binomial_tail_bound", "brute_force_linear_arboricity", "brute_force_min_cover",
    "build_graph", "check_expansion", "cherry_matching", "cover", "cover_target",
    "decompose_with_core", "degree_stats", "extend_forest_to_hamilton", "find_hamilton_cycle",
    "hamilton_path_between", "konig_edge_coloring", "load_profile", "pack_hamilton_cycles",
    "sample_gnp", "verify_cover", "verify_hamilton_cycle",
]
