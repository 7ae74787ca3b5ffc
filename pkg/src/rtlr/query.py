"""Reconnecting top-l relationships queries.

Three strategies share one sketch set:

* ``sbg``: plain greedy, every remaining candidate is re-estimated each round.
* ``ce_sbg``: the same greedy over candidates pruned by group reachability.
* ``o_sbg``: lazy greedy driven by a persistent upper-bound index.

All gains are sketch estimates; ``QueryResult.est_gain`` is the marginal
spread increase over the group's baseline for every strategy.
"""

from __future__ import annotations

import heapq
import threading
import time
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ._backend import core
from .predictor import CandidateEdgeSet
from .sketch import ReachMarks, SketchSet, _sources, mark_edge_reach, mark_group_reach
from .temporal_graph import SnapshotGraph

Edge = tuple[int, int]
ALGORITHMS = ("sbg", "ce_sbg", "o_sbg")


@dataclass
class QueryResult:
    algorithm: str
    edges: list[Edge]
    est_gain: float
    probes: int
    wall_time: float
    gains: list[float] = field(default_factory=list)
    candidates: int = 0

    @property
    def runtime_ms(self) -> float:
        return self.wall_time * 1000.0


def prune_candidates(ce: CandidateEdgeSet, group: Iterable[int], gt: SnapshotGraph) -> CandidateEdgeSet:
    """Drop candidates with neither endpoint reachable from ``group`` in ``gt``."""
    seen = core.reach_mask(gt.indptr, gt.indices, _sources(group))
    return CandidateEdgeSet(e for e in ce if seen[e[0]] or seen[e[1]])


def sbg_query(gt: SnapshotGraph, ce: CandidateEdgeSet, group: Iterable[int], l: int,
              ss: SketchSet, algorithm: str = "sbg") -> QueryResult:
    """Greedy selection that probes every remaining candidate each round.

    Ties go to the smallest candidate edge.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    start = time.perf_counter()
    group = list(group)
    remaining = list(ce.edges)
    selected: list[Edge] = []
    gains: list[float] = []
    # each probe's full re-estimate equals the round's marked reach plus the
    # probe's marginal, so only the marginal is traversed
    marks = mark_group_reach(ss, ReachMarks.empty(ss), group)
    probes = gained = 0
    for _ in range(l):
        if not remaining:
            break
        rem = np.array(remaining, dtype=np.int32).reshape(-1, 2)
        bs, bd = marks.bonus_arrays()
        counts = core.probe_gains(ss.indptr, ss.indices, marks.sg, rem[:, 0], rem[:, 1], bs, bd)
        probes += len(remaining)
        # argmax keeps the first maximum, i.e. the smallest remaining edge
        best_i = int(np.argmax(counts))
        best = remaining.pop(best_i)
        selected.append(best)
        gained += int(counts[best_i])
        gains.append(int(counts[best_i]) / ss.theta)
        mark_edge_reach(ss, marks, best)
    return QueryResult(algorithm, selected, gained / ss.theta, probes,
                       time.perf_counter() - start, gains, len(ce))


def ce_sbg_query(gt: SnapshotGraph, ce: CandidateEdgeSet, group: Iterable[int], l: int,
                 ss: SketchSet) -> QueryResult:
    start = time.perf_counter()
    group = list(group)
    res = sbg_query(gt, prune_candidates(ce, group, gt), group, l, ss, algorithm="ce_sbg")
    res.wall_time = time.perf_counter() - start
    return res


class UblIndex:
    """First-step upper bound per candidate edge and whether it has been
    narrowed to a sketch average. Bounds only ever decrease.

    Queries mutate the index; ``lock`` gives whole-index exclusivity.
    """

    def __init__(self, ce: CandidateEdgeSet, ub1: np.ndarray, flag: np.ndarray, sketches: SketchSet):
        self.ce = ce
        self.ub1 = ub1
        self.flag = flag
        self.sketches = sketches
        self.lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.ce)

    def ub1_of(self, e: Edge) -> float:
        return float(self.ub1[self.ce.id_of(e)])

    def flag_of(self, e: Edge) -> bool:
        return bool(self.flag[self.ce.id_of(e)])

    def narrow(self, e: Edge, value: float) -> None:
        i = self.ce.id_of(e)
        self.ub1[i] = min(self.ub1[i], value)
        self.flag[i] = True

    @property
    def narrowed_count(self) -> int:
        return int(self.flag.sum())


def build_ubl(ce: CandidateEdgeSet, gt: SnapshotGraph, ss: SketchSet) -> UblIndex:
    """UB1(u, v) = size of the reflexive forward closure of ``v`` in ``gt``."""
    reach: dict[int, int] = {}
    ub1 = np.empty(len(ce), dtype=np.float64)
    for i, (_, v) in enumerate(ce):
        r = reach.get(v)
        if r is None:
            r = reach[v] = int(core.reach_mask(gt.indptr, gt.indices, _sources([v])).sum())
        ub1[i] = r
    return UblIndex(ce, ub1, np.zeros(len(ce), dtype=bool), ss)


class ProbeQueue:
    """Max-queue of ``(edge, ub2)``; equal bounds pop the smaller edge first.

    Updates are lazy: stale heap entries are skipped on access.
    """

    def __init__(self):
        self._heap: list[tuple[float, Edge]] = []
        self._ub2: dict[Edge, float] = {}

    def __len__(self) -> int:
        return len(self._ub2)

    def __contains__(self, e) -> bool:
        return e in self._ub2

    def push(self, e: Edge, ub2: float) -> None:
        self._ub2[e] = ub2
        heapq.heappush(self._heap, (-ub2, e))

    update = push

    def ub2(self, e: Edge) -> float:
        return self._ub2[e]

    def edges(self) -> list[Edge]:
        return list(self._ub2)

    def _clean(self) -> None:
        h = self._heap
        while h and self._ub2.get(h[0][1]) != -h[0][0]:
            heapq.heappop(h)

    def peek(self) -> tuple[Edge, float] | None:
        self._clean()
        if not self._heap:
            return None
        neg, e = self._heap[0]
        return e, -neg

    def pop(self) -> tuple[Edge, float]:
        self._clean()
        neg, e = heapq.heappop(self._heap)
        del self._ub2[e]
        return e, -neg


def sketch_estimate(e: Edge, marks: ReachMarks, ubl: UblIndex, q: ProbeQueue | None,
                    ss: SketchSet) -> float:
    """Marginal sketch gain of reconnecting ``e`` given the current marks.

    Side effects: the queue entry of ``e`` (if present) takes the new value
    as its second-step bound, and an un-narrowed UB1 is replaced by the
    sketch-average reach of the edge's head.
    """
    u, v = e
    fresh = not ubl.flag_of(e)
    bs, bd = marks.bonus_arrays()
    count, count_total = core.marginal_counts(ss.indptr, ss.indices, marks.sg, int(u), int(v),
                                              bs, bd, fresh)
    gain = count / ss.theta
    if q is not None and e in q:
        q.update(e, gain)
    if fresh:
        ubl.narrow(e, count_total / ss.theta)
    return gain


def osbg_query(gt: SnapshotGraph, ce: CandidateEdgeSet, group: Iterable[int], l: int,
               ss: SketchSet, ubl: UblIndex, refresh_bounds: bool = True) -> QueryResult:
    """Order-based lazy greedy.

    Candidates are probed in decreasing second-step bound; a round stops as
    soon as the next bound cannot beat the best gain found (an equal bound
    on a smaller edge is still probed, to keep smallest-edge tie-breaking).
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    if ubl.sketches is not ss:
        raise ValueError("UBL index was built against a different sketch set")
    with ubl.lock:
        return _osbg(gt, ce, list(group), l, ss, ubl, refresh_bounds)


def _osbg(gt, ce, group, l, ss, ubl, refresh_bounds) -> QueryResult:
    start = time.perf_counter()
    pruned = prune_candidates(ce, group, gt)
    q = ProbeQueue()
    for e in pruned:
        q.push(e, ubl.ub1_of(e))
    ce_src = np.fromiter((u for u, _ in ce), dtype=np.int64, count=len(ce))
    ce_dst = np.fromiter((v for _, v in ce), dtype=np.int64, count=len(ce))
    in_play = np.zeros(len(ce), dtype=bool)
    in_play[[ce.id_of(e) for e in pruned]] = True

    marks = mark_group_reach(ss, ReachMarks.empty(ss), group)
    base = prev = marks.total()
    selected: list[Edge] = []
    gains: list[float] = []
    probes = 0
    for _ in range(l):
        if not len(q):
            break
        best: Edge | None = None
        i_max = 0.0
        probed: list[tuple[Edge, float]] = []
        while len(q):
            e, ub2 = q.peek()
            if best is not None and (ub2 < i_max or (ub2 == i_max and e > best)):
                break
            q.pop()
            gain = sketch_estimate(e, marks, ubl, None, ss)
            probes += 1
            probed.append((e, gain))
            if best is None or gain > i_max or (gain == i_max and e < best):
                best, i_max = e, gain
        for e, gain in probed:
            if e != best:
                q.push(e, gain)

        before = marks.sg.copy() if refresh_bounds else None
        newly = np.zeros(ss.num_vertices, dtype=np.uint8)
        mark_edge_reach(ss, marks, best, newly)
        selected.append(best)
        in_play[ce.id_of(best)] = True
        total = marks.total()
        gains.append((total - prev) / ss.theta)
        prev = total

        grown = np.flatnonzero(~in_play & ((newly[ce_src] != 0) | (newly[ce_dst] != 0)))
        cap = _open_bound(marks, ce_src[grown], ce_dst[grown], ss) if refresh_bounds else None
        for k, i in enumerate(grown.tolist()):
            e = ce[i]
            in_play[i] = True
            b = ubl.ub1_of(e)
            q.push(e, b if cap is None else min(b, cap[k]))
        if refresh_bounds:
            _refresh_stale(q, ce, ce_src, ce_dst, ss, marks, before, best)
    return QueryResult("o_sbg", selected, (prev - base) / ss.theta, probes,
                       time.perf_counter() - start, gains, len(pruned))


def _open_bound(marks: ReachMarks, u: np.ndarray, v: np.ndarray, ss: SketchSet) -> np.ndarray:
    """Cheap gain cap from the marks alone: only sketches with ``u`` reached
    and ``v`` not contribute, each at most its count of unreached vertices."""
    sg = marks.sg
    unreached = ss.num_vertices - sg.sum(axis=1, dtype=np.int64)
    open_ = (sg[:, u] != 0) & (sg[:, v] == 0)
    return (open_ * unreached[:, None]).sum(axis=0) / ss.theta


def _refresh_stale(q, ce, ce_src, ce_dst, ss, marks, before, best) -> None:
    """Raise UB2 of queued edges whose marginal gain may have grown.

    Reconnections are complementary, so after ``best`` is chosen a pending
    edge (u, v) can gain in sketch k if u became reached there, or if v
    reaches the chosen tail through vertices still unreached in k (and the
    chosen head is unreached there too, else the new edge adds nothing).
    In every other sketch the edge's contribution can only shrink, so the
    old UB2 still covers those; a grown sketch contributes at most its
    count of unreached vertices.
    """
    pending = [ce.id_of(e) for e in q.edges()]
    if not pending:
        return
    idx = np.asarray(pending, dtype=np.int64)
    u, v = ce_src[idx], ce_dst[idx]
    sg = marks.sg
    open_ = (sg[:, u] != 0) & (sg[:, v] == 0)
    reach_tail = np.zeros_like(sg)
    rip, rix = ss.reverse()
    bs, bd = marks.bonus_arrays()
    core.reverse_flags(rip, rix, sg, int(best[0]), int(best[1]), bs, bd, reach_tail)
    grew = open_ & ((before[:, u] == 0) | (reach_tail[:, v] != 0))
    unreached = ss.num_vertices - sg.sum(axis=1, dtype=np.int64)
    extra = (grew * unreached[:, None]).sum(axis=0)
    cap = (open_ * unreached[:, None]).sum(axis=0)
    for i, x, c in zip(idx.tolist(), extra.tolist(), cap.tolist()):
        if x:
            e = ce[i]
            q.update(e, min(q.ub2(e) + x / ss.theta, c / ss.theta))


def run_algorithm(name: str, gt: SnapshotGraph, ce: CandidateEdgeSet, group, l: int,
                  ss: SketchSet, ubl: UblIndex | None = None) -> QueryResult:
    if name == "sbg":
        return sbg_query(gt, ce, group, l, ss)
    if name == "ce_sbg":
        return ce_sbg_query(gt, ce, group, l, ss)
    if name == "o_sbg":
        if ubl is None:
            ubl = build_ubl(ce, gt, ss)
        return osbg_query(gt, ce, group, l, ss, ubl)
    raise ValueError(f"unknown algorithm {name!r}")
