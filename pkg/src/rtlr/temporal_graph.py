"""Evolving directed graphs: edge-list ingestion, snapshot partitioning and
weighted-cascade propagation probabilities."""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

FORMAT_VERSION = 1
_SPLIT = re.compile(r"[,\s]+")


class ParseError(ValueError):
    """Malformed temporal edge list."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class TemporalEdge:
    src: int
    dst: int
    ts: int


@dataclass
class EdgeList:
    """Parsed temporal edges plus the dense label mapping."""

    edges: list[TemporalEdge]
    labels: list[str]
    self_loops_dropped: int = 0

    @property
    def num_vertices(self) -> int:
        return len(self.labels)


def load_temporal_edges(source, delimiter: str | None = None) -> EdgeList:
    """Parse a SNAP-style ``src dst ts`` edge list.

    ``source`` may be a path, a text/binary stream, or raw bytes. Raw vertex
    labels are remapped to dense ids in order of first appearance. Lines
    starting with ``#`` are comments. Self-loops are dropped (their labels
    still count as vertices).
    """
    text = _read_text(source)
    splitter = _SPLIT if delimiter is None else re.compile(re.escape(delimiter) + r"|\s+")
    label_ids: dict[str, int] = {}
    labels: list[str] = []
    edges: list[TemporalEdge] = []
    loops = 0
    seen_content = False

    def vid(label: str) -> int:
        i = label_ids.get(label)
        if i is None:
            i = label_ids[label] = len(labels)
            labels.append(label)
        return i

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        seen_content = True
        parts = [p for p in splitter.split(line) if p]
        if len(parts) != 3:
            raise ParseError(f"expected 'src dst ts', got {len(parts)} field(s)", lineno)
        try:
            ts = int(parts[2])
        except ValueError:
            raise ParseError(f"timestamp {parts[2]!r} is not an integer", lineno) from None
        u, v = vid(parts[0]), vid(parts[1])
        if u == v:
            loops += 1
            continue
        edges.append(TemporalEdge(u, v, ts))

    if not seen_content:
        raise ParseError("empty edge list")
    return EdgeList(edges, labels, loops)


def _read_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8")
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8")
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


class SnapshotGraph:
    """Immutable directed graph in CSR form with IC edge probabilities.

    Parallel edges collapse to one; ``prob[e] = 1 / in_degree(dst)``.
    """

    __slots__ = ("num_vertices", "indptr", "indices", "prob", "in_degree", "edge_set", "_src")

    def __init__(self, num_vertices: int, src: Iterable[int], dst: Iterable[int]):
        n = int(num_vertices)
        src = np.asarray(list(src) if not isinstance(src, np.ndarray) else src, dtype=np.int64)
        dst = np.asarray(list(dst) if not isinstance(dst, np.ndarray) else dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ValueError("src and dst differ in length")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint outside vertex range")
        if np.any(src == dst):
            raise ValueError("self-loops are not allowed")
        keys = np.unique(src * n + dst) if src.size else np.empty(0, np.int64)
        s, d = keys // max(n, 1), keys % max(n, 1)
        self.num_vertices = n
        self._src = s.astype(np.int32)
        self.indices = d.astype(np.int32)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(s, minlength=n), out=self.indptr[1:])
        self.in_degree = np.bincount(d, minlength=n).astype(np.int64)
        self.prob = 1.0 / self.in_degree[d] if d.size else np.empty(0, np.float64)
        self.edge_set = frozenset(zip(s.tolist(), d.tolist()))
        for a in (self.indptr, self.indices, self.prob, self.in_degree, self._src):
            a.flags.writeable = False

    @classmethod
    def from_edges(cls, num_vertices: int, edges: Iterable[tuple[int, int]]) -> "SnapshotGraph":
        pairs = list(edges)
        return cls(num_vertices, [u for u, _ in pairs], [v for _, v in pairs])

    @property
    def num_edges(self) -> int:
        return int(self.indices.size)

    @property
    def src(self) -> np.ndarray:
        return self._src

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self._src.tolist(), self.indices.tolist()))

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edge_set

    def out_neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def out_adj(self, u: int) -> list[tuple[int, float]]:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.prob[lo:hi].tolist()))

    def out_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edge_index(self, u: int, v: int) -> int:
        lo, hi = int(self.indptr[u]), int(self.indptr[u + 1])
        k = lo + int(np.searchsorted(self.indices[lo:hi], v))
        if k >= hi or self.indices[k] != v:
            raise KeyError((u, v))
        return k

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SnapshotGraph)
            and self.num_vertices == other.num_vertices
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __repr__(self) -> str:
        return f"SnapshotGraph(|V|={self.num_vertices}, |E|={self.num_edges})"


def propagation_probability(g: SnapshotGraph, e: tuple[int, int]) -> float:
    """``1 / in_degree(v)`` for an edge ``(u, v)`` of ``g``."""
    u, v = e
    if not g.has_edge(u, v):
        raise KeyError(f"edge {e} not in snapshot")
    return 1.0 / int(g.in_degree[v])


@dataclass
class EvolvingGraph:
    num_vertices: int
    snapshots: list[SnapshotGraph]
    labels: list[str] = field(default_factory=list)
    windows: list[tuple[float, float]] = field(default_factory=list)

    def __post_init__(self):
        if not self.labels:
            self.labels = [str(i) for i in range(self.num_vertices)]
        self._ids = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def T(self) -> int:
        return len(self.snapshots)

    def vertex_id(self, label) -> int:
        try:
            return self._ids[str(label)]
        except KeyError:
            raise KeyError(f"unknown vertex {label!r}") from None

    def label(self, v: int) -> str:
        return self.labels[v]

    def edge_counts(self) -> dict[tuple[int, int], int]:
        """Number of snapshots each (deduplicated) edge appears in."""
        counts: dict[tuple[int, int], int] = {}
        for g in self.snapshots:
            for e in g.edges():
                counts[e] = counts.get(e, 0) + 1
        return counts

    def union_edges(self) -> set[tuple[int, int]]:
        out: set[tuple[int, int]] = set()
        for g in self.snapshots:
            out |= g.edge_set
        return out

    # serialization -------------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "format": "rtlr-evolving-graph",
            "version": FORMAT_VERSION,
            "num_vertices": self.num_vertices,
            "labels": self.labels,
            "windows": [list(w) for w in self.windows],
            "snapshots": [
                {"src": g.src.tolist(), "dst": g.indices.tolist()} for g in self.snapshots
            ],
        }
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "EvolvingGraph":
        doc = json.loads(text)
        if doc.get("format") != "rtlr-evolving-graph":
            raise ValueError("not an evolving-graph document")
        if doc.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported format version {doc.get('version')}")
        n = doc["num_vertices"]
        snaps = [SnapshotGraph(n, s["src"], s["dst"]) for s in doc["snapshots"]]
        return cls(n, snaps, list(doc["labels"]), [tuple(w) for w in doc["windows"]])

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "EvolvingGraph":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def snapshot_index(ts: int, t_min: int, t_max: int, T: int) -> int:
    """Window of ``ts`` when ``[t_min, t_max]`` is cut into ``T`` equal parts.

    Windows are half-open except the last, which is closed on the right.
    """
    span = t_max - t_min
    if span == 0:
        return 0
    # integer arithmetic: floor((ts - t_min) * T / span) avoids float drift
    return min(T - 1, (ts - t_min) * T // span)


def partition_snapshots(edges: EdgeList | Sequence[TemporalEdge], T: int,
                        num_vertices: int | None = None,
                        labels: Sequence[str] | None = None) -> EvolvingGraph:
    """Split temporal edges into ``T`` equal-width time windows."""
    if T <= 0:
        raise ValueError(f"snapshot count must be positive, got {T}")
    if isinstance(edges, EdgeList):
        labels = edges.labels if labels is None else labels
        num_vertices = edges.num_vertices if num_vertices is None else num_vertices
        edges = edges.edges
    if not edges:
        raise ValueError("no edges to partition")
    if num_vertices is None:
        num_vertices = 1 + max(max(e.src, e.dst) for e in edges)
    ts = [e.ts for e in edges]
    t_min, t_max = min(ts), max(ts)
    buckets: list[tuple[list[int], list[int]]] = [([], []) for _ in range(T)]
    for e in edges:
        s, d = buckets[snapshot_index(e.ts, t_min, t_max, T)]
        s.append(e.src)
        d.append(e.dst)
    snaps = [SnapshotGraph(num_vertices, s, d) for s, d in buckets]
    width = (t_max - t_min) / T
    windows = [(t_min + i * width, t_min + (i + 1) * width) for i in range(T)]
    return EvolvingGraph(num_vertices, snaps, list(labels) if labels else [], windows)


def read_edge_pairs(source, graph: EvolvingGraph) -> list[tuple[int, int]]:
    """Read an untimed ``src dst`` list (e.g. a supplied future snapshot),
    mapping labels through ``graph``. A third column, if present, is ignored."""
    text = _read_text(source)
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p for p in _SPLIT.split(line) if p]
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'src dst', got {len(parts)} field(s)", lineno)
        u, v = graph.vertex_id(parts[0]), graph.vertex_id(parts[1])
        if u != v:
            out.append((u, v))
    return out


def write_edge_pairs(g: SnapshotGraph, labels: Sequence[str], stream: io.TextIOBase) -> None:
    for u, v in g.edges():
        stream.write(f"{labels[u]} {labels[v]}\n")

