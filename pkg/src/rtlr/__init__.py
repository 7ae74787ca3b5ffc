"""Reconnecting top-l relationships (RTlR) queries on evolving graphs.

Pick the ``l`` formerly existing edges whose reconnection most increases a
user group's expected influence spread in a predicted future snapshot.
"""

from ._backend import BACKEND
from .diffusion import CapacityError, SeedSpec, SpreadEstimate, exact_spread, mc_gain, mc_spread, simulate_ic
from .predictor import CandidateEdgeSet, PredictorKind, candidate_edges, predict_next_snapshot
from .query import (
    ProbeQueue,
    QueryResult,
    UblIndex,
    build_ubl,
    ce_sbg_query,
    osbg_query,
    prune_candidates,
    sbg_query,
    sketch_estimate,
)
from .sketch import (
    ReachMarks,
    SketchSet,
    fi_counts,
    fi_estimate,
    generate_sketches,
    mark_edge_reach,
    mark_group_reach,
    reach_set,
    theta_bound,
)
from .temporal_graph import (
    EdgeList,
    EvolvingGraph,
    ParseError,
    SnapshotGraph,
    TemporalEdge,
    load_temporal_edges,
    partition_snapshots,
    propagation_probability,
)

__version__ = "0.1.0"
