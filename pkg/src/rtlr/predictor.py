"""Heuristic next-snapshot predictors and the candidate edge set.

The query algorithms only consume the predicted snapshot, so simple
persistence-style heuristics stand in for a learned link predictor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .temporal_graph import EvolvingGraph, SnapshotGraph

Edge = tuple[int, int]


@dataclass(frozen=True)
class PredictorKind:
    """``persistence`` | ``union`` (majority of last ``k``) | ``threshold``."""

    variant: str = "persistence"
    k: int = 1
    tau: float = 1.0

    def __post_init__(self):
        if self.variant not in ("persistence", "union", "threshold"):
            raise ValueError(f"unknown predictor variant {self.variant!r}")
        if self.k < 1:
            raise ValueError("union predictor needs k >= 1")
        if not 0 < self.tau <= 1:
            raise ValueError("threshold predictor needs 0 < tau <= 1")

    @classmethod
    def parse(cls, text: str) -> "PredictorKind":
        """Parse ``persistence``, ``union:<k>`` or ``threshold:<tau>``."""
        name, _, arg = text.strip().partition(":")
        try:
            if name in ("persistence", "persistence_last", "last"):
                return cls("persistence")
            if name in ("union", "persistence_union_k"):
                return cls("union", k=int(arg))
            if name in ("threshold", "score_threshold"):
                return cls("threshold", tau=float(arg))
        except ValueError as exc:
            raise ValueError(f"bad predictor argument in {text!r}: {exc}") from None
        raise ValueError(f"unknown predictor {text!r}")

    def __str__(self) -> str:
        if self.variant == "union":
            return f"union:{self.k}"
        if self.variant == "threshold":
            return f"threshold:{self.tau:g}"
        return "persistence"


def predict_next_snapshot(g: EvolvingGraph, kind: PredictorKind = PredictorKind()) -> SnapshotGraph:
    T = g.T
    if T < 1:
        raise ValueError("need at least one snapshot")
    n = g.num_vertices
    if kind.variant == "persistence":
        last = g.snapshots[-1]
        return SnapshotGraph(n, last.src, last.indices)
    if kind.variant == "union":
        if T < kind.k:
            raise ValueError(f"union:{kind.k} needs {kind.k} snapshots, graph has {T}")
        need = math.ceil(kind.k / 2)
        counts: dict[Edge, int] = {}
        for snap in g.snapshots[T - kind.k:]:
            for e in snap.edge_set:
                counts[e] = counts.get(e, 0) + 1
        return SnapshotGraph.from_edges(n, sorted(e for e, c in counts.items() if c >= need))
    if T < 2:
        raise ValueError("threshold predictor needs at least two snapshots")
    # c / T >= tau, compared as c >= tau * T with a tolerance for float tau
    keep = [e for e, c in g.edge_counts().items() if c >= kind.tau * T - 1e-9]
    return SnapshotGraph.from_edges(n, sorted(keep))


class CandidateEdgeSet:
    """Historical edges missing from the predicted snapshot, sorted by
    ``(src, dst)``; an edge's position is its candidate id."""

    __slots__ = ("edges", "_ids")

    def __init__(self, edges):
        self.edges: list[Edge] = sorted({(int(u), int(v)) for u, v in edges})
        self._ids = {e: i for i, e in enumerate(self.edges)}

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.edges)

    def __getitem__(self, i: int) -> Edge:
        return self.edges[i]

    def __contains__(self, e) -> bool:
        return tuple(e) in self._ids

    def id_of(self, e: Edge) -> int:
        return self._ids[tuple(e)]

    def subset(self, ids) -> "CandidateEdgeSet":
        return CandidateEdgeSet(self.edges[i] for i in ids)

    def __eq__(self, other) -> bool:
        return isinstance(other, CandidateEdgeSet) and self.edges == other.edges

    def __repr__(self) -> str:
        return f"CandidateEdgeSet({self.edges!r})"


def candidate_edges(g: EvolvingGraph, gt: SnapshotGraph) -> CandidateEdgeSet:
    if gt.num_vertices != g.num_vertices:
        raise ValueError("predicted snapshot has a different vertex universe")
    return CandidateEdgeSet(g.union_edges() - gt.edge_set)
