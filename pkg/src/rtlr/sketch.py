"""Forward-influence sketches over a predicted snapshot.

A sketch is a random subgraph of ``G_t`` that keeps each edge independently
with its propagation probability. Averaging reach counts over many sketches
estimates expected spread; the :class:`ReachMarks` table caches, per sketch,
which vertices the query group (plus already reconnected edges) reaches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._backend import core
from .temporal_graph import SnapshotGraph

SKETCH_FORMAT_VERSION = 1
DEFAULT_THETA = 200

Edge = tuple[int, int]


def _edge_arrays(edges: Iterable[Edge]) -> tuple[np.ndarray, np.ndarray]:
    edges = list(edges)
    src = np.fromiter((u for u, _ in edges), dtype=np.int32, count=len(edges))
    dst = np.fromiter((v for _, v in edges), dtype=np.int32, count=len(edges))
    return src, dst


def _sources(vertices: Iterable[int]) -> np.ndarray:
    return np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int32)


def sketch_rng(seed: int, sketch_index: int) -> np.random.Generator:
    """Independent stream for one sketch; does not depend on theta."""
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), sketch_index]))


@dataclass
class SketchSet:
    """``theta`` sampled subgraphs sharing one vertex set, stored as CSR.

    ``indptr[j]`` holds sketch ``j``'s row offsets into the shared ``indices``.
    """

    theta: int
    num_vertices: int
    indptr: np.ndarray
    indices: np.ndarray
    base_seed: int

    def __post_init__(self):
        self.indptr = np.ascontiguousarray(self.indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(self.indices, dtype=np.int32)
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False
        self._reverse: tuple[np.ndarray, np.ndarray] | None = None

    def reverse(self) -> tuple[np.ndarray, np.ndarray]:
        """Transposed sketches in the same layout, built on first use."""
        if self._reverse is None:
            n, theta = self.num_vertices, self.theta
            counts = np.diff(self.indptr, axis=1)
            src = np.repeat(np.tile(np.arange(n), theta), counts.ravel())
            sketch = np.repeat(np.arange(theta), counts.sum(axis=1))
            key = sketch * n + self.indices.astype(np.int64)
            order = np.argsort(key, kind="stable")
            rindptr = np.zeros(theta * n + 1, dtype=np.int64)
            np.cumsum(np.bincount(key, minlength=theta * n), out=rindptr[1:])
            full = np.empty((theta, n + 1), dtype=np.int64)
            full[:, :n] = rindptr[:-1].reshape(theta, n)
            full[:, n] = rindptr[n::n] if theta else 0
            self._reverse = (full, src[order].astype(np.int32))
        return self._reverse

    def sketch_csr(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Sketch ``j`` as a standalone ``(indptr, indices)`` pair."""
        row = self.indptr[j]
        return row - row[0], self.indices[row[0] : row[-1]]

    def edges(self, j: int) -> list[Edge]:
        ip, ix = self.sketch_csr(j)
        src = np.repeat(np.arange(self.num_vertices), np.diff(ip))
        return list(zip(src.tolist(), ix.tolist()))

    def num_edges(self, j: int) -> int:
        return int(self.indptr[j, -1] - self.indptr[j, 0])

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            np.savez_compressed(
                fh,
                version=np.int64(SKETCH_FORMAT_VERSION),
                theta=np.int64(self.theta),
                num_vertices=np.int64(self.num_vertices),
                base_seed=np.uint64(self.base_seed),
                indptr=self.indptr,
                indices=self.indices,
            )

    @classmethod
    def load(cls, path) -> "SketchSet":
        with np.load(Path(path)) as z:
            if int(z["version"]) != SKETCH_FORMAT_VERSION:
                raise ValueError(f"unsupported sketch format version {int(z['version'])}")
            return cls(int(z["theta"]), int(z["num_vertices"]), z["indptr"], z["indices"],
                       int(z["base_seed"]))


def generate_sketches(gt: SnapshotGraph, theta: int = DEFAULT_THETA, seed: int = 0) -> SketchSet:
    """Sample ``theta`` sketches; edge ``e`` survives in sketch ``j`` iff the
    ``e``-th draw of stream ``(seed, j)`` is below ``p(e)``."""
    if theta < 1:
        raise ValueError(f"theta must be >= 1, got {theta}")
    n = gt.num_vertices
    src = gt.src.astype(np.int64)
    indptr = np.empty((theta, n + 1), dtype=np.int64)
    chunks = []
    offset = 0
    for j in range(theta):
        keep = sketch_rng(seed, j).random(gt.num_edges) < gt.prob
        kept_dst = gt.indices[keep]
        indptr[j, 0] = offset
        np.cumsum(np.bincount(src[keep], minlength=n), out=indptr[j, 1:])
        indptr[j, 1:] += offset
        offset += kept_dst.size
        chunks.append(kept_dst)
    indices = np.concatenate(chunks) if chunks else np.empty(0, np.int32)
    return SketchSet(theta, n, indptr, indices, seed)


def reach_set(indptr: np.ndarray, indices: np.ndarray, sources: Iterable[int]) -> set[int]:
    """Reflexive forward closure of ``sources`` in a CSR graph."""
    mask = core.reach_mask(np.ascontiguousarray(indptr, dtype=np.int64),
                           np.ascontiguousarray(indices, dtype=np.int32), _sources(sources))
    return set(np.flatnonzero(mask).tolist())


def fi_counts(ss: SketchSet, group: Iterable[int], selected: Sequence[Edge] = ()) -> np.ndarray:
    """Per-sketch reach of ``group`` with ``selected`` edges always live."""
    bs, bd = _edge_arrays(selected)
    return core.sketch_reach_counts(ss.indptr, ss.indices, _sources(group), bs, bd)


def fi_estimate(ss: SketchSet, group: Iterable[int], selected: Sequence[Edge] = (),
                probe: Edge | None = None) -> float:
    """Estimated absolute spread of ``group`` after reconnecting
    ``selected`` plus ``probe``."""
    edges = list(selected) if probe is None else [*selected, probe]
    return int(fi_counts(ss, group, edges).sum()) / ss.theta


@dataclass
class ReachMarks:
    """Per-sketch reached-vertex table plus the edges already reconnected."""

    sg: np.ndarray
    selected: list[Edge] = field(default_factory=list)

    @classmethod
    def empty(cls, ss: SketchSet) -> "ReachMarks":
        return cls(np.zeros((ss.theta, ss.num_vertices), dtype=np.uint8))

    def total(self) -> int:
        return int(self.sg.sum(dtype=np.int64))

    def bonus_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return _edge_arrays(self.selected)


def mark_group_reach(ss: SketchSet, marks: ReachMarks, group: Iterable[int]) -> ReachMarks:
    bs, bd = marks.bonus_arrays()
    core.mark_sources(ss.indptr, ss.indices, marks.sg, _sources(group), bs, bd)
    return marks


def mark_edge_reach(ss: SketchSet, marks: ReachMarks, chosen: Edge,
                    newly: np.ndarray | None = None) -> ReachMarks:
    """Record ``chosen`` as reconnected and extend each affected row.

    The update cascades through earlier selections whose tails become newly
    reached, so every row stays equal to a from-scratch recomputation.
    ``newly`` (length |V|, uint8) collects vertices marked in any sketch.
    """
    u, v = chosen
    marks.selected.append((int(u), int(v)))
    if newly is None:
        newly = np.zeros(ss.num_vertices, dtype=np.uint8)
    bs, bd = marks.bonus_arrays()
    core.mark_edge(ss.indptr, ss.indices, marks.sg, int(u), int(v), bs, bd, newly)
    return marks


def theta_bound(num_vertices: int, l: int, epsilon: float) -> float:
    """Sketch count giving an (1 - 1/e - eps) guarantee w.p. 1 - |V|^-l:
    ``(8 + 2 eps) |V| (ln|V| + ln C(|V|, l) + ln 2) / eps^2``."""
    n = num_vertices
    if n < 1 or not 0 <= l <= n or epsilon <= 0:
        raise ValueError("need |V| >= 1, 0 <= l <= |V| and epsilon > 0")
    log_binom = math.lgamma(n + 1) - math.lgamma(l + 1) - math.lgamma(n - l + 1)
    return (8 + 2 * epsilon) * n * (math.log(n) + log_binom + math.log(2)) / epsilon**2
