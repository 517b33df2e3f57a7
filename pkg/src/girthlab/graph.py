"""Graph representation, girth and short-cycle machinery, matching contraction.

Vertices are dense integers 0..n-1. The adjacency is stored CSR-style in two
numpy arrays (offsets, neighbors) with each neighbor list sorted, which keeps
million-vertex graphs cheap while staying simple. Graphs are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, ValidationError

ACYCLIC = math.inf

_MOD = "graph-core"


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with sorted adjacency lists.

    `declared_degree` is the uniform degree when the graph is regular,
    else None. Symmetry / no-loop / no-parallel-edge invariants are
    enforced by `build_graph`; code constructing Graph directly must
    guarantee them.
    """

    n: int
    offsets: np.ndarray  # int64, length n+1
    nbrs: np.ndarray     # int64, length 2m, sorted within each vertex slice
    declared_degree: int | None = None

    @property
    def m(self) -> int:
        return len(self.nbrs) // 2

    def neighbors(self, u: int) -> np.ndarray:
        return self.nbrs[self.offsets[u]:self.offsets[u + 1]]

    def degree(self, u: int) -> int:
        return int(self.offsets[u + 1] - self.offsets[u])

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def has_edge(self, u: int, v: int) -> bool:
        sl = self.neighbors(u)
        i = np.searchsorted(sl, v)
        return i < len(sl) and sl[i] == v

    def edge_list(self) -> np.ndarray:
        """All edges as an (m, 2) array with u < v, lexicographically sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        mask = src < self.nbrs
        return np.column_stack([src[mask], self.nbrs[mask]])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.declared_degree == other.declared_degree
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.nbrs, other.nbrs)
        )


@dataclass(frozen=True)
class Cycle:
    """A vertex-simple cycle, canonicalized so that cyclic shifts and
    reversals of the same cycle compare equal (lexicographically least
    rotation of the lexicographically smaller orientation)."""

    vertices: tuple  # canonical vertex sequence, length == number of edges

    @property
    def length(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> tuple:
        vs = self.vertices
        return tuple((vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))

    def sort_key(self) -> tuple:
        return (self.length, self.vertices)


def canonical_cycle(vertices) -> Cycle:
    """Canonical representative among all rotations of both orientations."""
    vs = list(int(v) for v in vertices)
    k = len(vs)
    best = None
    for seq in (vs, vs[::-1]):
        for s in range(k):
            rot = tuple(seq[s:] + seq[:s])
            if best is None or rot < best:
                best = rot
    return Cycle(best)


@dataclass(frozen=True)
class Matching:
    """Bijection between two disjoint vertex sets, stored as (u, v) pairs."""

    pairs: tuple

    def __post_init__(self):
        seen = set()
        for u, v in self.pairs:
            if u in seen or v in seen or u == v:
                raise ValidationError(
                    f"matching is not a bijection at pair ({u}, {v})",
                    module=_MOD, stage="matching")
            seen.add(u)
            seen.add(v)


def build_graph(n: int, edges, declared_degree: int | None = None) -> Graph:
    """Validate an edge list and build the CSR adjacency.

    Rejects loops, duplicate edges and out-of-range endpoints, naming the
    offending edge. Degree uniformity is detected and recorded.
    """
    e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                   dtype=np.int64)
    if e.size == 0:
        e = e.reshape(0, 2)
    if e.ndim != 2 or e.shape[1] != 2:
        raise ValidationError("edge list must be pairs", module=_MOD, stage="build")
    if n <= 0:
        raise ValidationError("vertex count must be positive", module=_MOD, stage="build")

    if e.shape[0]:
        bad = (e < 0) | (e >= n)
        if bad.any():
            i = int(np.flatnonzero(bad.any(axis=1))[0])
            raise ValidationError(
                f"edge ({e[i, 0]}, {e[i, 1]}) has an endpoint outside [0, {n})",
                module=_MOD, stage="build")
        loops = e[:, 0] == e[:, 1]
        if loops.any():
            i = int(np.flatnonzero(loops)[0])
            raise ValidationError(
                f"loop edge ({e[i, 0]}, {e[i, 1]})", module=_MOD, stage="build")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        key = lo * n + hi
        order = np.argsort(key, kind="stable")
        dup = np.flatnonzero(key[order][1:] == key[order][:-1])
        if dup.size:
            i = order[int(dup[0])]
            raise ValidationError(
                f"duplicate edge ({lo[i]}, {hi[i]})", module=_MOD, stage="build")
    else:
        lo = hi = np.empty(0, dtype=np.int64)

    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.add.at(offsets, src + 1, 1)
    np.cumsum(offsets, out=offsets)

    degs = np.diff(offsets)
    uniform = int(degs[0]) if n and (degs == degs[0]).all() else None
    if declared_degree is not None and uniform != declared_degree:
        raise ValidationError(
            f"declared degree {declared_degree} but graph is "
            f"{'non-regular' if uniform is None else f'{uniform}-regular'}",
            module=_MOD, stage="build")
    return Graph(n=n, offsets=offsets, nbrs=dst, declared_degree=uniform)


def distance(G: Graph, u: int, v: int) -> int | float:
    """Hop distance by BFS; math.inf when unreachable."""
    if u == v:
        return 0
    dist = {u: 0}
    q = deque([u])
    while q:
        x = q.popleft()
        dx = dist[x]
        for y in G.neighbors(x):
            y = int(y)
            if y not in dist:
                if y == v:
                    return dx + 1
                dist[y] = dx + 1
                q.append(y)
    return math.inf


def ball(G: Graph, u: int, radius: int) -> set:
    """All vertices at distance <= radius from u."""
    seen = {u}
    frontier = [u]
    for _ in range(radius):
        nxt = []
        for x in frontier:
            for y in G.neighbors(x):
                y = int(y)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if not nxt:
            break
        frontier = nxt
    return seen


def bfs_distances(G: Graph, sources, cutoff: float = math.inf) -> dict:
    """Distance map from a set of sources, truncated at cutoff."""
    dist = {int(s): 0 for s in sources}
    q = deque(dist.keys())
    while q:
        x = q.popleft()
        dx = dist[x]
        if dx >= cutoff:
            continue
        for y in G.neighbors(x):
            y = int(y)
            if y not in dist:
                dist[y] = dx + 1
                q.append(y)
    return dist


def girth(G: Graph) -> int | float:
    """Exact girth via truncated per-vertex BFS; ACYCLIC (inf) for forests.

    From each root, a non-tree edge met at depths (dx, dy) witnesses a cycle
    of length <= dx+dy+1 through the root's BFS tree; the minimum over all
    roots is exact. Searches are truncated once they can no longer improve
    the best cycle found so far.
    """
    n = G.n
    best = math.inf
    dist = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    touched: list = []
    for root in range(n):
        if G.degree(root) < 2:
            continue
        limit = (best - 1) // 2 if best < math.inf else math.inf
        if limit < 0:
            break
        for t in touched:
            dist[t] = -1
            parent[t] = -1
        touched = [root]
        dist[root] = 0
        frontier = [root]
        depth = 0
        while frontier and depth <= limit:
            nxt = []
            for x in frontier:
                for y in G.neighbors(x):
                    y = int(y)
                    if y == parent[x]:
                        # skips one multi-use parent edge; simple graphs only
                        continue
                    if dist[y] < 0:
                        dist[y] = depth + 1
                        parent[y] = x
                        touched.append(y)
                        nxt.append(y)
                    else:
                        cand = depth + dist[y] + 1
                        if cand < best:
                            best = cand
                            limit = (best - 1) // 2
            frontier = nxt
            depth += 1
        if best == 3:
            break
    return best


def enumerate_short_cycles(G: Graph, L: int, cap: int = 10 ** 6) -> list:
    """All vertex-simple cycles of length <= L, one canonical Cycle each.

    DFS rooted at each cycle's minimum vertex over strictly larger
    intermediate vertices, so every cycle is generated exactly once up to
    orientation; orientation duplicates are removed by requiring the second
    vertex to be smaller than the last. Aborts with a budget error when the
    output exceeds `cap`, signalling that L is too large for this graph.
    """
    if L < 3:
        raise ValidationError("cycle length cap must be >= 3 (simple graphs)",
                              module=_MOD, stage="enumerate_short_cycles")
    out = []
    path = []

    def extend(root: int, x: int):
        for y in G.neighbors(x):
            y = int(y)
            if y == root and len(path) >= 3:
                if path[1] < path[-1]:
                    out.append(Cycle(tuple(path)))
                    if len(out) > cap:
                        raise BudgetError(
                            f"more than {cap} cycles of length <= {L}",
                            module=_MOD, stage="enumerate_short_cycles")
            elif y > root and y not in on_path and len(path) < L:
                on_path.add(y)
                path.append(y)
                extend(root, y)
                path.pop()
                on_path.remove(y)

    for root in range(G.n):
        on_path = {root}
        path = [root]
        extend(root, root)
    out.sort(key=Cycle.sort_key)
    return out


def contract_matching(G: Graph, M: Matching):
    """Contract each matched pair into a single vertex.

    Requires every pair to be an edge whose endpoints share no other
    neighbor (otherwise the contraction would create a loop or parallel
    edge and the offending pair is reported). Returns (graph, vertex_map)
    where vertex_map sends old vertex ids to new ones.
    """
    pairs = np.asarray(M.pairs, dtype=np.int64).reshape(-1, 2)
    for u, v in pairs:
        if not G.has_edge(int(u), int(v)):
            raise ValidationError(
                f"matched pair ({u}, {v}) is not an edge", module=_MOD,
                stage="contract_matching")

    rep = np.arange(G.n, dtype=np.int64)
    rep[pairs[:, 1]] = pairs[:, 0]
    rep[pairs[:, 0]] = pairs[:, 0]
    keep = np.ones(G.n, dtype=bool)
    keep[pairs[:, 1]] = False
    new_id = np.cumsum(keep) - 1
    vertex_map = new_id[rep]

    e = G.edge_list()
    a, b = vertex_map[e[:, 0]], vertex_map[e[:, 1]]
    loops = a == b
    # the matched edges themselves contract to loops and are dropped; any
    # other loop is impossible because pairs are disjoint
    a, b = a[~loops], b[~loops]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    n_new = int(keep.sum())
    key = lo * n_new + hi
    order = np.argsort(key)
    dup = np.flatnonzero(key[order][1:] == key[order][:-1])
    if dup.size:
        i = int(order[int(dup[0])])
        pair_new = vertex_map[pairs[:, 0]]
        hit = np.flatnonzero((pair_new == lo[i]) | (pair_new == hi[i]))
        which = f"pair ({pairs[hit[0], 0]}, {pairs[hit[0], 1]})" if hit.size \
            else f"new edge ({lo[i]}, {hi[i]})"
        raise ValidationError(
            f"contraction creates a parallel edge at {which}",
            module=_MOD, stage="contract_matching")
    g2 = build_graph(n_new, np.column_stack([lo, hi]))
    return g2, vertex_map


# ---------------------------------------------------------------------------
# Text format: `# girthlab-graph n=<n> m=<m> d=<degree|*>` then `u v` lines.


def write_graph_text(G: Graph, extra_comments: list | None = None) -> str:
    d = "*" if G.declared_degree is None else str(G.declared_degree)
    lines = [f"# girthlab-graph n={G.n} m={G.m} d={d}"]
    for c in extra_comments or []:
        lines.append(f"# {c}")
    e = G.edge_list()
    lines.extend(f"{u} {v}" for u, v in e.tolist())
    return "\n".join(lines) + "\n"


def read_graph_text(text: str) -> Graph:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# girthlab-graph "):
        raise ValidationError("missing girthlab-graph header", module=_MOD,
                              stage="read")
    fields = {}
    for token in lines[0].split()[2:]:
        if "=" not in token:
            raise ValidationError(f"malformed header token {token!r}",
                                  module=_MOD, stage="read")
        k, v = token.split("=", 1)
        fields[k] = v
    try:
        n, m = int(fields["n"]), int(fields["m"])
        d = None if fields["d"] == "*" else int(fields["d"])
    except (KeyError, ValueError) as exc:
        raise ValidationError(f"malformed header: {lines[0]!r}", module=_MOD,
                              stage="read") from exc
    body = [ln for ln in lines[1:] if ln and not ln.startswith("#")]
    if len(body) != m:
        raise ValidationError(f"header claims m={m} but found {len(body)} edges",
                              module=_MOD, stage="read")
    edges = np.array([ln.split() for ln in body], dtype=np.int64) if body \
        else np.empty((0, 2), dtype=np.int64)
    G = build_graph(n, edges)
    if d is not None and G.declared_degree != d:
        raise ValidationError(
            f"header claims d={d} but graph is not {d}-regular",
            module=_MOD, stage="read")
    return G


def read_levels_comment(text: str) -> np.ndarray | None:
    """Parse the optional `# levels ...` comment emitted for tree graphs."""
    for ln in text.splitlines():
        if ln.startswith("# levels "):
            return np.array(ln.split()[2:], dtype=np.int64)
    return None
