"""Synthetic temporal graphs for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .temporal_graph import EdgeList, TemporalEdge


def preferential_attachment_temporal(n: int, m: int = 3, horizon: int = 100_000,
                                     repeat_rate: float = 4.0, seed: int = 0) -> EdgeList:
    """Directed preferential-attachment graph with recurring interactions.

    Vertex ``i`` arrives at time ``i * horizon / (2 n)`` and links to ``m``
    earlier vertices picked proportionally to degree, in a random direction.
    Each link then recurs ``Poisson(repeat_rate)`` more times at uniform
    times after its creation, so most links are absent from any given late
    window and later become reconnection candidates.
    """
    if n <= m:
        raise ValueError("need n > m")
    rng = np.random.default_rng(seed)
    ends: list[int] = list(range(m))  # degree-weighted urn
    edges: list[TemporalEdge] = []
    for i in range(m, n):
        birth = int(i * horizon // (2 * n))
        chosen: set[int] = set()
        while len(chosen) < m:
            chosen.add(ends[int(rng.integers(len(ends)))])
        for t in sorted(chosen):
            u, v = (i, t) if rng.random() < 0.5 else (t, i)
            times = [birth, *rng.integers(birth, horizon + 1, size=rng.poisson(repeat_rate)).tolist()]
            edges.extend(TemporalEdge(u, v, int(ts)) for ts in times)
            ends.extend((i, t))
    edges.sort(key=lambda e: (e.ts, e.src, e.dst))
    return EdgeList(edges, [str(i) for i in range(n)], 0)


def random_temporal(n: int, T: int, edges_per_snapshot: int, seed: int = 0,
                    persist: float = 0.5) -> EdgeList:
    """Small random temporal graph over ``T`` unit-width windows.

    Each window keeps every edge of the previous one with probability
    ``persist`` and adds fresh uniformly random edges up to the target size.
    """
    rng = np.random.default_rng(seed)
    edges: list[TemporalEdge] = []
    current: set[tuple[int, int]] = set()
    for t in range(T):
        current = {e for e in sorted(current) if rng.random() < persist}
        while len(current) < edges_per_snapshot:
            u, v = (int(x) for x in rng.integers(n, size=2))
            if u != v:
                current.add((u, v))
        edges.extend(TemporalEdge(u, v, t) for u, v in sorted(current))
    # timestamps 0..T-1 map one-to-one onto T equal windows
    return EdgeList(edges, [str(i) for i in range(n)], 0)
