"""Placement of GNN data-graph vertices onto heterogeneous edge servers.

The cost of a layout (data collection, GNN compute, cross-server traffic and
server maintenance) is minimised by repeated two-server minimum s-t cuts.
Evolving graphs are handled incrementally, with an adaptive rule deciding
when a full re-optimisation is worth it.
"""

from .baselines import OracleResult, brute_force_optimal, greedy_layout, random_layout
from .cost import (
    CostBreakdown,
    CostDecomposition,
    compute_cost,
    data_collection_cost,
    decompose,
    maintenance_cost,
    marginal_cost,
    subset_cost,
    total_cost,
    traffic_cost,
)
from .dynamic import (
    LinkDelete,
    LinkInsert,
    SlotTrace,
    TimelineState,
    VertexDelete,
    VertexInsert,
    advance_instance,
    apply_events,
    estimate_drift_bound,
    filter_affected,
    glad_a,
    glad_e,
    run_timeline,
)
from .errors import *  # noqa: F401,F403
from .mincut import CutResult, FlowNetwork, min_st_cut, to_dimacs
from .model import (
    DataGraph,
    EdgeNetwork,
    EdgeServer,
    GnnModelSpec,
    GraphLayout,
    Instance,
    cross_links,
    fully_connected,
    make_servers,
    resident_vertices,
    validate_layout,
)
from .scenario import ChurnConfig, SynthesisConfig, generate_trace, kmeans_pivots, load_graph, synthesize_instance
from .static import (
    GladConfig,
    IterationLog,
    VisitCounter,
    build_auxiliary_graph,
    cut_to_layout,
    glad_s,
    init_layout,
    optimize,
    select_pair,
)

__version__ = "0.1.0"
