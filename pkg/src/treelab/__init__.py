"""treelab: exact expansion towers, circulations and matchings.

Builds d-regular bipartite expansions of regular base graphs, stacks them
into recursive towers with exact or symbolic size accounting, samples the
inverse-limit object lazily, and verifies the circulation obstructions
carried by perfect matchings with exact rational arithmetic.
"""

from ._kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION
from .analysis import (
    AnalysisError,
    DefectReport,
    MassBoundReport,
    best_level_orientation,
    build_knowhow_potential,
    circulation_mass_bound_check,
    knowhow_defect,
    lifted_orientation,
    matching_paradox_demo,
    max_aligned_circulation,
    orientation_by_sign,
)
from .expansion import (
    ExpansionCounts,
    ExpansionError,
    ExpansionParams,
    MaterializationLimitError,
    MaterializedExpansion,
    SamplingDiagnosticError,
    V0,
    V1,
    counts,
    materialize,
    neighbors,
    potential_value,
    project,
    sample_uniform_in_fiber,
    sample_uniform_vertex,
)
from .flow import FlowError, is_acyclic, max_circulation
from .graphs import (
    Circulation,
    FiniteGraph,
    GraphError,
    Orientation,
    Potential,
    fundamental_cycles,
    is_circulation,
    make_complete_bipartite,
    matching_to_circulation,
    max_matching,
    orientation_by_index,
    potential_pairing,
    random_circulation,
)
from .sampler import (
    BallReport,
    SamplerError,
    TreeStatsRow,
    VertexPath,
    ball,
    persistent_neighbors,
    sample_path,
    tree_stats,
)
from .tower import (
    ALL,
    DEFAULT_LIMIT,
    LevelSpec,
    Schedule,
    SubsetRule,
    SymbolicSize,
    Tower,
    TowerError,
    build_tower,
    fiber_map_report,
    level_measure_check,
    v0_fraction,
)
from .verification import CheckResult, run_expansion_checks, run_tower_checks

__version__ = "0.1.0"
