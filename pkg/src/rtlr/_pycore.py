"""Pure-Python reference kernels.

Mirrors ``_ccore.pyx`` function for function; results must be identical.
Graphs are CSR: ``indptr`` (int64) and ``indices`` (int32). A sketch set is
a 2-D ``indptr`` of shape ``(theta, n + 1)`` whose offsets index one shared
``indices`` array. Bonus edges (``bonus_src[i] -> bonus_dst[i]``) are always
traversable.
"""

from collections import deque

import numpy as np

BACKEND = "python"

_M64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_EDGE_MUL = 0xD1B54A32D192ED03


def _mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def uniform(seed, trial, edge):
    """Counter-based uniform in [0, 1) keyed by (seed, trial, edge)."""
    z = _mix64((seed + _GOLDEN * (trial + 1)) & _M64)
    z = _mix64((z ^ ((edge + 1) * _EDGE_MUL)) & _M64)
    return (z >> 11) * (1.0 / 9007199254740992.0)


def _bonus_map(bonus_src, bonus_dst):
    out = {}
    for a, b in zip(np.asarray(bonus_src).tolist(), np.asarray(bonus_dst).tolist()):
        out.setdefault(a, []).append(b)
    return out


def reach_mask(indptr, indices, sources):
    """Forward-reachable closure of ``sources`` (reflexive) as a uint8 mask."""
    n = len(indptr) - 1
    seen = np.zeros(n, dtype=np.uint8)
    ip = indptr.tolist()
    ix = indices.tolist()
    q = deque()
    for s in np.asarray(sources).tolist():
        if not seen[s]:
            seen[s] = 1
            q.append(s)
    while q:
        x = q.popleft()
        for k in range(ip[x], ip[x + 1]):
            y = ix[k]
            if not seen[y]:
                seen[y] = 1
                q.append(y)
    return seen


def _bfs(ip, ix, starts, bonus, blocked):
    """Visit vertices reachable from ``starts`` avoiding ``blocked``; returns list."""
    seen = set()
    order = []
    q = deque()
    for s in starts:
        if s not in seen and not blocked(s):
            seen.add(s)
            order.append(s)
            q.append(s)
    while q:
        x = q.popleft()
        nbrs = ix[ip[x]:ip[x + 1]]
        if bonus and x in bonus:
            nbrs = list(nbrs) + bonus[x]
        for y in nbrs:
            if y not in seen and not blocked(y):
                seen.add(y)
                order.append(y)
                q.append(y)
    return order


def _never(_):
    return False


def sketch_reach_counts(sk_indptr, sk_indices, sources, bonus_src, bonus_dst):
    """Per-sketch size of the closure of ``sources`` under sketch + bonus edges."""
    theta = sk_indptr.shape[0]
    ix = sk_indices.tolist()
    bonus = _bonus_map(bonus_src, bonus_dst)
    starts = np.asarray(sources).tolist()
    out = np.zeros(theta, dtype=np.int64)
    for j in range(theta):
        ip = sk_indptr[j].tolist()
        out[j] = len(_bfs(ip, ix, starts, bonus, _never))
    return out


def probe_gains(sk_indptr, sk_indices, marks, probe_src, probe_dst, bonus_src, bonus_dst):
    """Marginal reach count of each probe edge against ``marks``."""
    return np.array([marginal_counts(sk_indptr, sk_indices, marks, int(u), int(v),
                                     bonus_src, bonus_dst, False)[0]
                     for u, v in zip(probe_src, probe_dst)], dtype=np.int64)


def mark_sources(sk_indptr, sk_indices, marks, sources, bonus_src, bonus_dst):
    """Mark, in every sketch row, all vertices reachable from ``sources``."""
    theta = sk_indptr.shape[0]
    ix = sk_indices.tolist()
    bonus = _bonus_map(bonus_src, bonus_dst)
    starts = np.asarray(sources).tolist()
    total = 0
    for j in range(theta):
        ip = sk_indptr[j].tolist()
        row = marks[j]
        hit = _bfs(ip, ix, starts, bonus, lambda y: row[y] != 0)
        for y in hit:
            row[y] = 1
        total += len(hit)
    return total


def marginal_counts(sk_indptr, sk_indices, marks, u, v, bonus_src, bonus_dst, with_total):
    """(count, count_total) for a probe edge ``u -> v``.

    ``count`` sums, over sketches where ``u`` is marked and ``v`` is not, the
    unmarked vertices reachable from ``v``. ``count_total`` sums the plain
    reflexive reach of ``v`` in each sketch (only if ``with_total``).
    """
    theta = sk_indptr.shape[0]
    ix = sk_indices.tolist()
    bonus = _bonus_map(bonus_src, bonus_dst)
    count = 0
    count_total = 0
    for j in range(theta):
        ip = sk_indptr[j].tolist()
        row = marks[j]
        if row[u] and not row[v]:
            count += len(_bfs(ip, ix, [v], bonus, lambda y: row[y] != 0))
        if with_total:
            count_total += len(_bfs(ip, ix, [v], None, _never))
    return count, count_total


def mark_edge(sk_indptr, sk_indices, marks, u, v, bonus_src, bonus_dst, newly):
    """Activate ``u -> v`` in every sketch where ``u`` is marked and ``v`` is not.

    ``bonus_*`` must already include the chosen edge so the fixpoint cascades
    through earlier selections. Sets ``newly[x] = 1`` for each newly marked x.
    """
    theta = sk_indptr.shape[0]
    ix = sk_indices.tolist()
    bonus = _bonus_map(bonus_src, bonus_dst)
    total = 0
    for j in range(theta):
        row = marks[j]
        if not row[u] or row[v]:
            continue
        ip = sk_indptr[j].tolist()
        hit = _bfs(ip, ix, [v], bonus, lambda y: row[y] != 0)
        for y in hit:
            row[y] = 1
            newly[y] = 1
        total += len(hit)
    return total


def ic_counts(indptr, indices, prob, sources, bonus_src, bonus_dst, seed, trial0, ntrials):
    """Activated-set sizes for ``ntrials`` independent-cascade realizations.

    Edge ``e`` is live in trial ``t`` iff ``uniform(seed, t, e) < prob[e]``;
    bonus edges are always live.
    """
    ip = indptr.tolist()
    ix = indices.tolist()
    pr = prob.tolist()
    bonus = _bonus_map(bonus_src, bonus_dst)
    starts = np.asarray(sources).tolist()
    out = np.zeros(ntrials, dtype=np.int64)
    for i in range(ntrials):
        t = trial0 + i
        seen = set()
        q = deque()
        for s in starts:
            if s not in seen:
                seen.add(s)
                q.append(s)
        while q:
            x = q.popleft()
            for k in range(ip[x], ip[x + 1]):
                y = ix[k]
                if y not in seen and uniform(seed, t, k) < pr[k]:
                    seen.add(y)
                    q.append(y)
            for y in bonus.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        out[i] = len(seen)
    return out


def reverse_flags(sk_rindptr, sk_rindices, marks, target, through, bonus_src, bonus_dst, flags):
    """Set ``flags[j, y]`` for unmarked ``y`` reaching ``target`` in sketch
    ``j``, for every sketch where ``target`` and ``through`` are unmarked (walking
    reversed sketch and bonus edges through unmarked vertices only).
    Returns the number of sketches scanned.
    """
    theta = sk_rindptr.shape[0]
    ix = sk_rindices.tolist()
    rbonus = _bonus_map(bonus_dst, bonus_src)
    scanned = 0
    for j in range(theta):
        row = marks[j]
        if row[target] or row[through]:
            continue
        scanned += 1
        ip = sk_rindptr[j].tolist()
        for y in _bfs(ip, ix, [target], rbonus, lambda y: row[y] != 0):
            flags[j, y] = 1
    return scanned
