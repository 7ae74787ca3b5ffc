"""Query pipelines, parameter sweeps and CSV result rows."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .diffusion import SpreadEstimate, mc_gain
from .predictor import CandidateEdgeSet, PredictorKind, candidate_edges, predict_next_snapshot
from .query import ALGORITHMS, QueryResult, UblIndex, build_ubl, run_algorithm
from .sketch import DEFAULT_THETA, SketchSet, generate_sketches
from .temporal_graph import (
    EvolvingGraph,
    SnapshotGraph,
    load_temporal_edges,
    partition_snapshots,
    read_edge_pairs,
)

CSV_COLUMNS = ("query_id", "algorithm", "l", "group", "runtime_ms", "probes",
               "est_gain", "mc_gain", "edges")


@dataclass
class SweepConfig:
    """Experiment settings; defaults follow the reference parameter table."""

    dataset_path: str | None = None
    T: int = 100
    theta: int = DEFAULT_THETA
    l_values: list[int] = field(default_factory=lambda: [10])
    group_sizes: list[int] = field(default_factory=lambda: [6])
    num_queries: int = 80
    predictor: PredictorKind = field(default_factory=PredictorKind)
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    seed: int = 0
    eval_trials: int = 0
    gt_file: str | None = None
    timing: bool = False

    def validate(self) -> None:
        if self.T < 1 or self.theta < 1 or self.num_queries < 1:
            raise ValueError("snapshots, theta and queries must be positive")
        for name in ("l_values", "group_sizes", "algorithms"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        if any(l < 0 for l in self.l_values) or any(k < 1 for k in self.group_sizes):
            raise ValueError("l must be >= 0 and group sizes >= 1")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"unknown algorithm(s): {', '.join(bad)}")
        if self.eval_trials < 0:
            raise ValueError("eval_trials must be >= 0")


@dataclass
class ResultRow:
    query_id: int
    algorithm: str
    l: int
    group: str
    runtime_ms: float | None
    probes: int
    est_gain: float
    mc_gain: float | None
    edges: str

    def as_csv(self) -> list[str]:
        return [
            str(self.query_id), self.algorithm, str(self.l), self.group,
            "" if self.runtime_ms is None else f"{self.runtime_ms:.3f}",
            str(self.probes), f"{self.est_gain:.6f}",
            "" if self.mc_gain is None else f"{self.mc_gain:.6f}",
            self.edges,
        ]


@dataclass
class Pipeline:
    """Graph, predicted snapshot, candidates, sketches and UBL index, built
    once and shared by every query of a run."""

    graph: EvolvingGraph
    gt: SnapshotGraph
    ce: CandidateEdgeSet
    sketches: SketchSet
    ubl: UblIndex

    @classmethod
    def build(cls, graph: EvolvingGraph, theta: int = DEFAULT_THETA, seed: int = 0,
              predictor: PredictorKind | None = None, gt: SnapshotGraph | None = None) -> "Pipeline":
        if gt is None:
            gt = predict_next_snapshot(graph, predictor or PredictorKind())
        ce = candidate_edges(graph, gt)
        ss = generate_sketches(gt, theta, seed)
        return cls(graph, gt, ce, ss, build_ubl(ce, gt, ss))

    @classmethod
    def from_config(cls, cfg: SweepConfig) -> "Pipeline":
        if not cfg.dataset_path:
            raise ValueError("no dataset given")
        graph = partition_snapshots(load_temporal_edges(cfg.dataset_path), cfg.T)
        gt = None
        if cfg.gt_file:
            gt = SnapshotGraph.from_edges(graph.num_vertices, read_edge_pairs(cfg.gt_file, graph))
        return cls.build(graph, cfg.theta, cfg.seed, cfg.predictor, gt)

    def resolve_group(self, labels: Iterable[str]) -> list[int]:
        return [self.graph.vertex_id(x) for x in labels]

    def format_edges(self, edges: Sequence[tuple[int, int]]) -> str:
        lab = self.graph.labels
        return ";".join(f"{lab[u]}->{lab[v]}" for u, v in edges)

    def parse_edges(self, text: str) -> list[tuple[int, int]]:
        out = []
        for part in filter(None, (p.strip() for p in text.split(";"))):
            a, sep, b = part.partition("->")
            if not sep:
                raise ValueError(f"bad edge {part!r}, expected 'u->v'")
            out.append((self.graph.vertex_id(a.strip()), self.graph.vertex_id(b.strip())))
        return out


def derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence([p & 0xFFFFFFFF for p in parts]).generate_state(1)[0])


def sample_groups(gt: SnapshotGraph, size: int, count: int, seed: int) -> list[list[int]]:
    """``count`` groups drawn uniformly from vertices with out-degree >= 1."""
    pool = np.flatnonzero(gt.out_degree() >= 1)
    if pool.size < size:
        raise ValueError(f"only {pool.size} vertices with out-degree >= 1, need groups of {size}")
    rng = np.random.default_rng([seed & 0xFFFFFFFF, size, 0x67])
    return [sorted(rng.choice(pool, size, replace=False).tolist()) for _ in range(count)]


def evaluate_result(gt: SnapshotGraph, group: Iterable[int], edges, trials: int,
                    seed: int = 0) -> SpreadEstimate:
    """Monte-Carlo spread gain of reconnecting ``edges`` (common random numbers)."""
    return mc_gain(gt, group, edges, trials, seed)


def run_query(pipe: Pipeline, group: Sequence[int], l: int, algorithms: Sequence[str] = ALGORITHMS,
              query_id: int = 0, eval_trials: int = 0, seed: int = 0,
              timing: bool = False) -> list[ResultRow]:
    """One row per requested algorithm, always in sbg, ce_sbg, o_sbg order."""
    n = pipe.graph.num_vertices
    for v in group:
        if not 0 <= v < n:
            raise ValueError(f"unknown vertex {v!r}")
    group_label = ";".join(pipe.graph.labels[v] for v in group)
    eval_seed = derive_seed(seed, query_id, 0x65)
    rows = []
    for name in ALGORITHMS:
        if name not in algorithms:
            continue
        res: QueryResult = run_algorithm(name, pipe.gt, pipe.ce, group, l, pipe.sketches, pipe.ubl)
        mc = None
        if eval_trials > 0:
            mc = evaluate_result(pipe.gt, group, res.edges, eval_trials, eval_seed).mean
        rows.append(ResultRow(query_id, name, l, group_label,
                              res.runtime_ms if timing else None, res.probes,
                              res.est_gain, mc, pipe.format_edges(res.edges)))
    return rows


def write_header(out: TextIO) -> csv.writer:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    return w


def run_sweep(cfg: SweepConfig, out: TextIO, pipe: Pipeline | None = None) -> list[ResultRow]:
    """Stream rows for every (group size, query, l, algorithm) and append a
    per-algorithm summary as ``#`` comment lines."""
    cfg.validate()
    pipe = pipe or Pipeline.from_config(cfg)
    w = write_header(out)
    rows: list[ResultRow] = []
    qid = 0
    for size in cfg.group_sizes:
        for group in sample_groups(pipe.gt, size, cfg.num_queries, cfg.seed):
            for l in cfg.l_values:
                batch = run_query(pipe, group, l, cfg.algorithms, qid, cfg.eval_trials,
                                  cfg.seed, cfg.timing)
                for r in batch:
                    w.writerow(r.as_csv())
                rows.extend(batch)
            qid += 1
    for line in summary_lines(rows):
        out.write(line + "\n")
    return rows


def summary_lines(rows: Sequence[ResultRow]) -> list[str]:
    lines = []
    for name in ALGORITHMS:
        mine = [r for r in rows if r.algorithm == name]
        if not mine:
            continue
        probes = sum(r.probes for r in mine) / len(mine)
        times = [r.runtime_ms for r in mine if r.runtime_ms is not None]
        rt = f"{sum(times) / len(times):.3f}" if times else "na"
        lines.append(f"# summary algorithm={name} rows={len(mine)} "
                     f"mean_runtime_ms={rt} mean_probes={probes:.3f}")
    return lines


def read_rows(text: str) -> list[dict[str, str]]:
    body = "\n".join(l for l in text.splitlines() if not l.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def load_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        out[key.strip().replace("_", "-")] = value.strip()
    return out


__all__ = [
    "CSV_COLUMNS", "Pipeline", "ResultRow", "SweepConfig", "evaluate_result",
    "load_config_file", "read_rows", "run_query", "run_sweep", "sample_groups",
]
