"""Glued double-tree construction with planted localized eigenvectors.

Pipeline: two depth-D marked trees, a uniform random matching of the marked
leaves, forward-switching repair of the short-cycle inventory, contraction
of the matching, degree-fixing gadgets at the merged marked vertices, and
the planted eigenvector (+f on one tree, -f on the other, 0 elsewhere).

Cycles in the union graph alternate matching-edge traversals with tree
excursions of even length, so short-cycle enumeration reduces to ancestor
joins over the leaves; with threshold L <= 11 every short cycle uses
exactly two matching edges (four traversals already need length >= 12).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (BudgetError, InternalError, StarvationError,
                     ValidationError)
from .graph import (Cycle, Graph, Matching, build_graph, canonical_cycle,
                    enumerate_short_cycles, girth)
from .seeds import derive_seed, rng_for

_MOD = "glue-construct"

FAST_ENUM_MAX_L = 11  # two matching traversals only; k=4 needs length >= 12


def random_matching(V1, V2, seed: int) -> Matching:
    """Uniform random bijection between two equal-size vertex sets
    (Fisher-Yates shuffle of V2 under the seeded generator)."""
    v1 = np.asarray(V1, dtype=np.int64)
    v2 = np.asarray(V2, dtype=np.int64)
    if len(v1) != len(v2):
        raise ValidationError(f"set sizes differ: {len(v1)} vs {len(v2)}",
                              module=_MOD, stage="random_matching")
    perm = rng_for(seed, "matching").permutation(len(v2))
    return Matching(tuple((int(a), int(b)) for a, b in zip(v1, v2[perm])))


@dataclass(frozen=True)
class GlueCycle:
    """A short union-graph cycle: its matching edges (as T1-side leaf
    indices) and, for the two-traversal case, the excursion half-lengths."""

    length: int
    leaf_edges: tuple  # sorted T1 leaf indices of the matching edges used
    h1: int            # T1 excursion half-length (0 for generic k>2 cycles)
    h2: int
    cycle: Cycle

    def sort_key(self):
        return self.cycle.sort_key()


@dataclass(frozen=True)
class SwitchRecord:
    iteration: int
    e: tuple           # removed matching edge (s, t), union-graph ids
    f: tuple           # removed matching edge (u, v)
    added: tuple       # ((s, v), (u, t))
    separation: int    # certified lower bound on dist(e, f)
    used_2l_rule: bool  # True when the 2L-separation tier applied
    eligible_count: int
    inventory_before: int
    inventory_after: int


class GlueState:
    """Two depth-D marked trees plus the leaf matching and its short-cycle
    inventory; mutated by forward switchings.

    Union-graph ids: T1' occupies [0, n_t), T2' occupies [n_t, 2 n_t).
    `pi` maps the T1 leaf index i to its matched T2 leaf index.
    """

    def __init__(self, d: int, depth: int, pi: np.ndarray, L: int):
        from .trees import TreeSpec
        self.spec = TreeSpec(d, depth)
        self.d = d
        self.depth = depth
        self.n_t = self.spec.n
        self.n_leaves = self.spec.level_size(depth)
        self.leaf_off = self.spec.level_offset(depth)
        self.L = int(L)
        self.parents = self.spec.parents()
        self._level_offsets = [self.spec.level_offset(i) for i in range(depth + 2)]
        self.switch_log: list = []
        self.restarts = 0
        self.inventory: list = []
        self.set_pi(pi)

    def set_pi(self, pi: np.ndarray):
        pi = np.asarray(pi, dtype=np.int64)
        if not np.array_equal(np.sort(pi), np.arange(self.n_leaves)):
            raise ValidationError("pi is not a permutation of the leaves",
                                  module=_MOD, stage="glue_state")
        self.pi = pi.copy()
        self.pi_inv = np.empty_like(self.pi)
        self.pi_inv[self.pi] = np.arange(self.n_leaves)
        self.refresh_inventory()

    # ---------------------------------------------------------------- ids

    def leaf1_id(self, i):
        return self.leaf_off + i

    def leaf2_id(self, j):
        return self.n_t + self.leaf_off + j

    def matching_edge(self, i: int) -> tuple:
        return (int(self.leaf1_id(i)), int(self.leaf2_id(self.pi[i])))

    def union_graph(self) -> Graph:
        child = np.flatnonzero(self.parents >= 0)
        tree_edges = np.column_stack([self.parents[child], child])
        match = np.column_stack([self.leaf1_id(np.arange(self.n_leaves)),
                                 self.leaf2_id(self.pi)])
        return build_graph(2 * self.n_t,
                           np.vstack([tree_edges, tree_edges + self.n_t, match]))

    def matching(self) -> Matching:
        idx = np.arange(self.n_leaves)
        return Matching(tuple(
            (int(a), int(b))
            for a, b in zip(self.leaf1_id(idx), self.leaf2_id(self.pi))))

    # ------------------------------------------------- implicit adjacency

    def _level_of(self, local: int) -> int:
        for ell in range(self.depth, -1, -1):
            if local >= self._level_offsets[ell]:
                return ell
        raise InternalError("vertex outside tree", module=_MOD, stage="adjacency")

    def _neighbors(self, v: int) -> list:
        tree, local = divmod(v, self.n_t)
        out = []
        p = self.parents[local]
        if p >= 0:
            out.append(tree * self.n_t + int(p))
        if local >= self.leaf_off:
            i = local - self.leaf_off
            if tree == 0:
                out.append(int(self.leaf2_id(self.pi[i])))
            else:
                out.append(int(self.leaf1_id(self.pi_inv[i])))
        else:
            lev = self._level_of(local)
            r = local - self._level_offsets[lev]
            width = self.d + 1 if lev == 0 else self.d
            base = tree * self.n_t + (self._level_offsets[lev + 1] + r * self.d
                                      if lev else 1)
            out.extend(base + c for c in range(width))
        return out

    # ------------------------------------------------------- leaf ancestry

    def _leaf_anc(self, idx, h: int):
        """Height-h ancestor index (level depth-h), valid for 1 <= h < depth."""
        return idx // self.d ** h

    def _excursion_path(self, tree: int, a: int, b: int, h: int) -> list:
        """Leaf-to-leaf path ids through the height-h common ancestor."""
        d, D = self.d, self.depth
        base = tree * self.n_t

        def vid(x, leaf):  # ancestor of `leaf` at height x
            if x == D:
                return base  # the root
            return base + self._level_offsets[D - x] + leaf // d ** x

        up = [vid(x, a) for x in range(h + 1)]
        down = [vid(x, b) for x in range(h)]
        return up + down[::-1]

    # ----------------------------------------------------------- inventory

    def refresh_inventory(self):
        self.inventory = self._enumerate_cycles()

    def _enumerate_cycles(self) -> list:
        if self.L < 6:
            return []  # the shortest possible union cycle has length 6
        if self.L > FAST_ENUM_MAX_L:
            return self._enumerate_cycles_generic()
        D, L = self.depth, self.L
        out = []
        hmax1 = min((L - 4) // 2, D)
        for h1 in range(1, hmax1 + 1):
            i, j = self._pairs_at_height(h1)
            if len(i) == 0:
                continue
            p, q = self.pi[i], self.pi[j]
            hmax2 = min((L - 2 - 2 * h1) // 2, D)
            lca = np.zeros(len(i), dtype=np.int64)
            for h2 in range(1, min(hmax2, D - 1) + 1):
                hit = (self._leaf_anc(p, h2) == self._leaf_anc(q, h2)) & (lca == 0)
                lca[hit] = h2
            if hmax2 >= D:
                lca[lca == 0] = D  # distinct subtrees meet only at the root
            for ii, jj, pp, qq, h2 in zip(i.tolist(), j.tolist(), p.tolist(),
                                          q.tolist(), lca.tolist()):
                if h2 == 0:
                    continue
                out.append(self._make_cycle(ii, jj, pp, qq, h1, h2))
        out.sort(key=GlueCycle.sort_key)
        return out

    def _pairs_at_height(self, h: int):
        """Unordered T1 leaf-index pairs at tree distance exactly 2h
        (lowest common ancestor h levels up), vectorized per ancestor block."""
        d, D = self.d, self.depth
        if h < D:
            n_anc = self.spec.level_size(D - h)
            subtrees = d
        else:
            n_anc = 1
            subtrees = d + 1
        blk = d ** (h - 1)
        c1, c2 = np.triu_indices(subtrees, k=1)
        anc = np.arange(n_anc, dtype=np.int64) * (subtrees * blk)
        a_i = np.arange(blk, dtype=np.int64)
        shape = (n_anc, len(c1), blk, blk)
        i = np.broadcast_to(anc[:, None, None, None], shape) \
            + np.broadcast_to((c1 * blk)[None, :, None, None], shape) \
            + np.broadcast_to(a_i[None, None, :, None], shape)
        j = np.broadcast_to(anc[:, None, None, None], shape) \
            + np.broadcast_to((c2 * blk)[None, :, None, None], shape) \
            + np.broadcast_to(a_i[None, None, None, :], shape)
        return i.reshape(-1), j.reshape(-1)

    def _make_cycle(self, i, j, p, q, h1, h2) -> GlueCycle:
        # leaf1(i) -> leaf2(p) ..T2.. leaf2(q) -> leaf1(j) ..T1.. (closes at i)
        t2_path = self._excursion_path(1, p, q, h2)
        t1_path = self._excursion_path(0, j, i, h1)
        verts = [int(self.leaf1_id(i))] + t2_path + t1_path[:-1]
        length = 2 + 2 * h1 + 2 * h2
        cyc = canonical_cycle(verts)
        if cyc.length != length:
            raise InternalError("excursion path length mismatch", module=_MOD,
                                stage="inventory")
        return GlueCycle(length=length, leaf_edges=(int(min(i, j)), int(max(i, j))),
                         h1=h1, h2=h2, cycle=cyc)

    def _enumerate_cycles_generic(self) -> list:
        g = self.union_graph()
        out = []
        for c in enumerate_short_cycles(g, self.L):
            vs = c.vertices
            leaves = []
            for x in range(len(vs)):
                u, v = sorted((vs[x], vs[(x + 1) % len(vs)]))
                if self.leaf_off <= u < self.n_t and v >= self.n_t + self.leaf_off:
                    leaves.append(u - self.leaf_off)
            if len(leaves) < 2 or len(leaves) % 2:
                raise InternalError("union cycle must alternate matching edges",
                                    module=_MOD, stage="inventory")
            out.append(GlueCycle(length=c.length, leaf_edges=tuple(sorted(leaves)),
                                 h1=0, h2=0, cycle=c))
        out.sort(key=GlueCycle.sort_key)
        return out

    # ----------------------------------------------------------- distances

    def ball_leaves(self, sources, radius: int) -> set:
        """T1 leaf indices whose matching edge has an endpoint within
        `radius` hops of `sources` in the union graph."""
        dist = {int(s): 0 for s in sources}
        q = deque(dist.keys())
        hit = set()
        while q:
            x = q.popleft()
            dx = dist[x]
            tree, local = divmod(x, self.n_t)
            if local >= self.leaf_off:
                i = local - self.leaf_off
                hit.add(int(i) if tree == 0 else int(self.pi_inv[i]))
            if dx >= radius:
                continue
            for y in self._neighbors(x):
                if y not in dist:
                    dist[y] = dx + 1
                    q.append(y)
        return hit

    def min_contracted_cycle_length(self, search_cap: int = 6) -> float:
        """Exact minimum of (length - #matching edges) over union cycles up
        to contracted length `search_cap`; inf when none exists below it.

        A contracted cycle of length c lifts to a union cycle of length at
        most 3c/2, so scanning union cycles up to 3c/2 is exhaustive. The
        fast enumerator limits the scan to c <= 7.
        """
        saved = self.L
        best = math.inf
        try:
            for c in range(4, search_cap + 1, 2):
                lift = 3 * c // 2
                if lift > FAST_ENUM_MAX_L:
                    break
                self.L = lift
                cand = [cyc.length - len(cyc.leaf_edges)
                        for cyc in self._enumerate_cycles()]
                if cand:
                    best = min(cand)
                    break
        finally:
            self.L = saved
            self.refresh_inventory()
        return best


def forward_switch(state: GlueState, target: GlueCycle, seed: int,
                   _iteration: int = 0) -> SwitchRecord:
    """Destroy one short cycle by a forward switching.

    e is the lexicographically first matching edge of the target cycle;
    f is a uniformly random matching edge lying in no short cycle and far
    from e: at distance >= 2L when such edges exist, else at distance
    >= L+1 (still sound: a new cycle of length <= L through one new edge
    needs the removed endpoints within distance L-1, and through both new
    edges it needs a u-v path shorter than L, contradicting that f lay in
    no short cycle). The inventory is recomputed and the post-conditions
    -- strictly fewer cycles of the target length, no new short cycles --
    are asserted.
    """
    if not any(c.cycle == target.cycle for c in state.inventory):
        raise ValidationError("target cycle is not in the inventory",
                              module=_MOD, stage="forward_switch")
    i = min(target.leaf_edges)
    s, t = state.matching_edge(i)
    in_cycles = {k for c in state.inventory for k in c.leaf_edges}

    candidates = set(range(state.n_leaves)) - in_cycles
    tier1 = sorted(candidates - state.ball_leaves((s, t), 2 * state.L - 1))
    if tier1:
        eligible, separation, used_2l = tier1, 2 * state.L, True
    else:
        tier2 = sorted(candidates - state.ball_leaves((s, t), state.L))
        if not tier2:
            raise StarvationError(
                f"no eligible partner edge for switching (|inventory|="
                f"{len(state.inventory)}, L={state.L})",
                residual_inventory=[c.cycle for c in state.inventory],
                module=_MOD, stage="forward_switch")
        eligible, separation, used_2l = tier2, state.L + 1, False

    j = eligible[int(rng_for(seed, "switch", _iteration).integers(len(eligible)))]
    u, v = state.matching_edge(j)
    before = len(state.inventory)
    old_keys = {c.cycle for c in state.inventory}
    target_count_before = sum(1 for c in state.inventory
                              if c.length == target.length)

    pi = state.pi.copy()
    pi[[i, j]] = pi[[j, i]]
    state.set_pi(pi)

    new_keys = {c.cycle for c in state.inventory}
    target_count_after = sum(1 for c in state.inventory
                             if c.length == target.length)
    if target_count_after >= target_count_before or not new_keys <= old_keys:
        raise InternalError("forward switch created or kept short cycles",
                            module=_MOD, stage="forward_switch")
    rec = SwitchRecord(
        iteration=_iteration, e=(s, t), f=(u, v), added=((s, v), (u, t)),
        separation=separation, used_2l_rule=used_2l,
        eligible_count=len(eligible), inventory_before=before,
        inventory_after=len(state.inventory))
    state.switch_log.append(rec)
    return rec


def repair_girth(state: GlueState, seed: int, max_switches: int | None = None,
                 max_restarts: int = 8) -> GlueState:
    """Drive the short-cycle inventory to empty by forward switchings,
    restarting with a fresh matching when switching starves. Raises a
    starvation error carrying the residual inventory when the budget is
    exhausted; never silently returns a dirty state. Idempotent on clean
    states."""
    if max_switches is None:
        max_switches = 50 * state.n_leaves
    switches = 0
    restart = 0
    while state.inventory:
        if switches >= max_switches:
            raise StarvationError(
                "switch budget exhausted",
                residual_inventory=[c.cycle for c in state.inventory],
                module=_MOD, stage="repair_girth")
        try:
            target = min(state.inventory, key=GlueCycle.sort_key)
            forward_switch(state, target, seed, _iteration=switches)
            switches += 1
        except StarvationError:
            restart += 1
            if restart > max_restarts:
                raise StarvationError(
                    f"repair failed after {max_restarts} restarts; "
                    f"{len(state.inventory)} cycles remain",
                    residual_inventory=[c.cycle for c in state.inventory],
                    module=_MOD, stage="repair_girth")
            state.restarts = restart
            state.set_pi(rng_for(seed, "restart", restart)
                         .permutation(state.n_leaves))
    return state


# ------------------------------------------------------------------ gadgets

@dataclass(frozen=True)
class GadgetSpec:
    degree: int        # target regular degree (d+1 in the assembly)
    size: int
    girth_target: int  # required girth of the sampled regular graph; the
    #                    edge surgery then guarantees girth >= girth_target-1

    def __post_init__(self):
        if self.degree * self.size % 2:
            raise ValidationError("degree * size must be even", module=_MOD,
                                  stage="make_gadget")
        if self.girth_target < 4 or self.size < 6:
            raise ValidationError("need girth_target >= 4 and size >= 6",
                                  module=_MOD, stage="make_gadget")


# smallest sizes at which sampling + switching finds the girth quickly
GADGET_SIZE_TABLE = {3: {4: 10, 5: 14, 6: 48}}


def default_gadget_girth_cap(degree: int) -> int:
    """Largest post-surgery gadget girth reached quickly at desk scale."""
    return 5 if degree == 3 else 3


def default_gadget_size(degree: int, girth_target: int) -> int:
    table = GADGET_SIZE_TABLE.get(degree, {})
    if girth_target in table:
        return table[girth_target]
    n = max(4 * degree + 8, 24)
    return n + (n * degree) % 2


def _pairing_model_regular(n: int, degree: int, rng) -> Graph | None:
    """One pairing-model draw; None when it collapses to a loop or
    parallel edge (the standard rejection step)."""
    stubs = np.repeat(np.arange(n, dtype=np.int64), degree)
    rng.shuffle(stubs)
    a, b = stubs[0::2], stubs[1::2]
    if (a == b).any():
        return None
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    key = lo * n + hi
    if len(np.unique(key)) != len(key):
        return None
    return build_graph(n, np.column_stack([lo, hi]))


def _edge_ball(g: Graph, edge, radius: int) -> set:
    dist = {edge[0]: 0, edge[1]: 0}
    q = deque(dist.keys())
    while q:
        x = q.popleft()
        if dist[x] >= radius:
            continue
        for y in g.neighbors(x):
            y = int(y)
            if y not in dist:
                dist[y] = dist[x] + 1
                q.append(y)
    return set(dist.keys())


def _repair_graph_girth(g: Graph, want_girth: int, seed: int,
                        max_switches: int = 400) -> Graph | None:
    """Forward switching on a plain regular graph: destroy cycles shorter
    than want_girth without creating new ones. Returns None on starvation
    (the caller resamples)."""
    L = want_girth - 1
    if L < 3:
        return g
    for it in range(max_switches):
        cycles = enumerate_short_cycles(g, L, cap=10 ** 5)
        if not cycles:
            return g
        target = cycles[0]
        s, t = min(tuple(sorted(e)) for e in target.edges)
        bad = {tuple(sorted(e)) for c in cycles for e in c.edges}
        edges = [tuple(e) for e in g.edge_list().tolist()]
        for radius in (2 * L - 1, L):
            ball_set = _edge_ball(g, (s, t), radius)
            far = [e for e in edges if e not in bad
                   and e[0] not in ball_set and e[1] not in ball_set]
            if far:
                break
        if not far:
            return None
        rng = rng_for(seed, "pick", it)
        u, v = far[int(rng.integers(len(far)))]
        if int(rng.integers(2)):
            u, v = v, u
        keep = [e for e in edges
                if e != (s, t) and e != tuple(sorted((u, v)))]
        keep += [tuple(sorted((s, v))), tuple(sorted((u, t)))]
        try:
            g2 = build_graph(g.n, keep)
        except ValidationError:
            return None
        post = enumerate_short_cycles(g2, L, cap=10 ** 5)
        if len(post) >= len(cycles):
            return None
        g = g2
    return None


def make_gadget(spec: GadgetSpec, seed: int, max_attempts: int = 200000):
    """Near-regular degree-fixing gadget: one distinguished vertex of degree
    degree-2, all others of degree `degree`, girth >= girth_target - 1.

    Pairing-model sampling (plus switching repair when it has room to act)
    until the regular graph reaches girth girth_target, then the edge
    surgery -- delete v-u1 and v-u2, add u1-u2 -- which shortens every
    cycle by at most 1. Returns (graph, distinguished_vertex, girth) with
    the exact measured girth of the finished gadget.
    """
    want = spec.girth_target
    for attempt in range(max_attempts):
        rng = rng_for(seed, "gadget", attempt)
        g = _pairing_model_regular(spec.size, spec.degree, rng)
        if g is None:
            continue
        if girth(g) < want:
            g = _repair_graph_girth(g, want,
                                    derive_seed(seed, "gadget_fix", attempt))
            if g is None or girth(g) < want:
                continue
        # surgery at the lex-first vertex pair; girth >= 4 rules out
        # adjacent neighbor pairs, so v = 0 with its two smallest
        # neighbors always works
        v = 0
        nb = [int(x) for x in g.neighbors(v)]
        u1, u2 = nb[0], nb[1]
        if g.has_edge(u1, u2):
            raise InternalError("triangle despite girth >= 4", module=_MOD,
                                stage="make_gadget")
        edges = [tuple(e) for e in g.edge_list().tolist()]
        edges.remove(tuple(sorted((v, u1))))
        edges.remove(tuple(sorted((v, u2))))
        edges.append(tuple(sorted((u1, u2))))
        out = build_graph(g.n, edges)
        got = girth(out)
        if got < spec.girth_target:
            raise InternalError("edge surgery lost more than one girth unit",
                                module=_MOD, stage="make_gadget")
        return out, v, int(got)
    raise BudgetError(
        f"no {spec.degree}-regular graph of girth >= {want} on {spec.size} "
        f"vertices found in {max_attempts} attempts; lower girth_target",
        module=_MOD, stage="make_gadget")
