"""Static LRU instruction-cache classification with exact single-block refinement."""

from .ai import AgeBoundState, classify_ai, fixpoint, may_join, may_update, must_join, must_update
from .checker import CheckKind, CheckVerdict, check_access, explore, reachable_pre_states
from .concrete import (
    ConcreteCacheState,
    OracleKind,
    OracleVerdict,
    concrete_update,
    enumerate_paths_oracle,
    simulate_trace,
)
from .driver import AnalysisReport, analyze, compute_stats, precision_stats
from .kernels import BACKEND
from .model import (
    AccessGraph,
    AccessPoint,
    CacheConfig,
    Classification,
    Kind,
    MemoryBlock,
    ProgramError,
    Provenance,
    filter_by_set,
    load_program,
    parse_program,
    serialize_program,
    split_basic_blocks,
)
from .slicer import Slice, slice_graph
from .tracked import EPSILON, Inside, alpha, tracked_update

__version__ = "0.1.0"
