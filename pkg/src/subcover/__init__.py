"""Streaming algorithms for non-monotone submodular cover and knapsack maximization."""
from .bounds import InstanceStats, instance_stats, theorem_bounds
from .cover import CoverInstance, multi, single, xi
from .errors import (
    ClampWarning, ConfigError, ContractViolation, DatasetError, InputError, SubcoverError,
)
from .exact import exact_kcsm_opt, exact_sc_opt
from .ingest import load_snap_graph, load_tagged_corpus, synth_instance, write_snap_graph
from .kcsm import KcsmInstance, single_max
from .objectives import (
    CostedUniverse, CoverageOracle, CutGraph, DiverseSummaryOracle, GraphCutOracle,
    InstrumentedOracle, ModularOracle, SetFunctionOracle, TaggedCorpus, diverse_summary_value,
    graph_cut_value, instrument, make_coverage, make_modular,
)
from .solution import BicriteriaSolution, RunMetrics
from .stream import StreamParams, run_stream, stream_finalize, stream_offer
from .usm import double_greedy, exact_usm, local_search, make_usm, random_set, repeated_double_greedy

__version__ = "0.1.0"
