"""End-to-end assembly of a (d+1)-regular high-girth graph with a planted
localized eigenvector, plus the construction report.

Given d, epsilon and a localization budget k: t is the largest integer with
(d+1) d^(t-1) <= k; the eigenvector tree has depth ceil(t/epsilon); marked
trees one level deeper are glued by a repaired random matching of their
leaves; matched leaf pairs are merged (each then has degree 2) and a
degree-fixing gadget is attached at every merged vertex. The planted vector
is the symmetric tree eigenvector on one tree, its negative on the other,
zero elsewhere, and satisfies the eigenvalue equation exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InternalError, ValidationError
from .eigensolver import Eigenpair
from .glue import (GadgetSpec, GlueState, Matching, default_gadget_girth_cap,
                   default_gadget_size, make_gadget, random_matching,
                   repair_girth)
from .graph import Graph, build_graph, contract_matching
from .seeds import derive_seed, rng_for
from .spectral import eigenvector_entropy
from .trees import TreeSpec, find_symmetric_eigenvalues, level_recurrence

_MOD = "glue-construct"


@dataclass
class AssembleConfig:
    """Knobs for the assembly; every randomized stage derives its seed from
    the single master seed."""

    c: float = 0.25               # L = floor(2 c log_d n_leaves)
    L: int | None = None          # explicit short-cycle threshold override
    gadget_girth: int | None = None   # default: min(glue girth, degree cap)
    gadget_size: int | None = None
    share_gadget: bool = True     # one gadget design, disjoint copies
    max_switches: int | None = None
    max_restarts: int = 8
    size_cap: int = 10 ** 7


@dataclass
class ConstructionReport:
    d: int
    epsilon: float
    k: int
    t: int
    D: int
    lam: float
    theta: float
    mass_on_S: float
    girth: float
    L: int
    switches_used: int
    restarts: int
    seed: int
    n: int
    set_size: int
    n_leaves: int
    glue_girth_floor: float
    gadget_girth: int
    gadget_size: int
    planted_residual: float
    entropy: float
    sin4_theta: float
    eligible_counts: list = field(default_factory=list)
    wall_clock_s: float = 0.0

    def to_dict(self) -> dict:
        out = {
            "d": self.d, "epsilon": self.epsilon, "k": self.k, "t": self.t,
            "D": self.D, "lambda": self.lam, "theta": self.theta,
            "mass_on_S": self.mass_on_S,
            "girth": self.girth if math.isfinite(self.girth) else "acyclic",
            "L": self.L, "switches_used": self.switches_used,
            "restarts": self.restarts, "seed": self.seed, "n": self.n,
            "set_size": self.set_size, "n_leaves": self.n_leaves,
            "glue_girth_floor": (self.glue_girth_floor
                                 if math.isfinite(self.glue_girth_floor)
                                 else "above_search_cap"),
            "gadget_girth": self.gadget_girth,
            "gadget_size": self.gadget_size,
            "planted_residual": self.planted_residual,
            "entropy": self.entropy, "sin4_theta": self.sin4_theta,
            "eligible_counts": self.eligible_counts,
        }
        return out


@dataclass
class Construction:
    graph: Graph
    planted: Eigenpair
    S: np.ndarray
    report: ConstructionReport
    # side data for analysis and tests
    state: GlueState
    vertex_map: np.ndarray        # union-graph ids -> final ids
    gadget: Graph
    gadget_distinguished: int


def localization_parameters(d: int, epsilon: float, k: int) -> tuple:
    """(t, eigenvector tree depth, glue tree depth, leaf count)."""
    if d < 2:
        raise ValidationError("need d >= 2", module=_MOD, stage="parameters")
    if not 0.0 < epsilon < 1.0:
        raise ValidationError("need epsilon in (0, 1)", module=_MOD,
                              stage="parameters")
    t = 1
    while (d + 1) * d ** t <= k:
        t += 1
    if (d + 1) * d ** (t - 1) > k:
        raise ValidationError(
            f"k={k} is too small: need k >= {(d + 1) * d} so that t >= 2",
            module=_MOD, stage="parameters")
    if t < 2:
        raise ValidationError(f"k={k} gives t={t} < 2", module=_MOD,
                              stage="parameters")
    depth_ev = math.ceil(t / epsilon)
    depth_glue = depth_ev + 1
    n_leaves = (d + 1) * d ** (depth_glue - 1)
    return t, depth_ev, depth_glue, n_leaves


def default_L(d: int, n_leaves: int, c: float = 0.25) -> int:
    return int(math.floor(2.0 * c * math.log(n_leaves, d)))


def select_eigenvalue(values, lam_target: float | None,
                      lam_index: int | None) -> float:
    if lam_index is not None:
        if not 0 <= lam_index < len(values):
            raise ValidationError(
                f"eigenvalue index {lam_index} outside 0..{len(values) - 1}",
                module=_MOD, stage="eigenvalue")
        return values[lam_index]
    target = 0.0 if lam_target is None else float(lam_target)
    return min(values, key=lambda v: (abs(v - target), v))


def assemble(d: int, epsilon: float, k: int, seed: int,
             lam_target: float | None = None, lam_index: int | None = None,
             config: AssembleConfig | None = None) -> Construction:
    """Run the full construction; every stage failure carries its stage name."""
    cfg = config or AssembleConfig()
    t0 = time.monotonic()
    t, depth_ev, depth_glue, n_leaves = localization_parameters(d, epsilon, k)
    ev_spec = TreeSpec(d, depth_ev)
    glue_spec = TreeSpec(d, depth_glue)
    if 2 * glue_spec.n > cfg.size_cap:
        raise ValidationError(
            f"construction needs {2 * glue_spec.n} tree vertices, over the "
            f"size cap {cfg.size_cap}", module=_MOD, stage="parameters")

    # ---- planted eigenvalue and level profile (exact leaf closure)
    lams = find_symmetric_eigenvalues(ev_spec)
    lam = select_eigenvalue(lams, lam_target, lam_index)
    profile = level_recurrence(lam, ev_spec)
    theta = math.acos(lam / (2.0 * math.sqrt(d)))

    # ---- glue and repair
    L = cfg.L if cfg.L is not None else default_L(d, n_leaves, cfg.c)
    perm = rng_for(seed, "matching").permutation(n_leaves)
    state = GlueState(d, depth_glue, perm, L)
    repair_girth(state, seed, max_switches=cfg.max_switches,
                 max_restarts=cfg.max_restarts)

    # ---- contract the matching
    union = state.union_graph()
    glue_graph, vmap_union = contract_matching(union, state.matching())
    n_glue = glue_graph.n
    marked_new = vmap_union[state.leaf_off + np.arange(n_leaves)]
    if not (glue_graph.degrees()[marked_new] == 2).all():
        raise InternalError("merged marked vertices must have degree 2",
                            module=_MOD, stage="contract")

    # ---- glue girth floor and the gadget
    glue_floor = state.min_contracted_cycle_length()
    cap = default_gadget_girth_cap(d + 1)
    if cfg.gadget_girth is not None:
        gadget_target = cfg.gadget_girth
    else:
        gadget_target = int(min(glue_floor, cap)) if math.isfinite(glue_floor) \
            else cap
    gadget_size = cfg.gadget_size if cfg.gadget_size is not None \
        else default_gadget_size(d + 1, gadget_target)
    gspec = GadgetSpec(degree=d + 1, size=gadget_size,
                       girth_target=gadget_target)
    gadget, dist_vertex, gadget_girth = make_gadget(
        gspec, derive_seed(seed, "gadget_master"))

    # ---- attach one gadget copy per marked vertex
    final_graph, planted_vec = _attach_and_plant(
        ev_spec, state, glue_graph, vmap_union, marked_new,
        gadget, dist_vertex, gspec, profile, seed, cfg)

    # ---- audits
    if final_graph.declared_degree != d + 1:
        raise InternalError("assembled graph is not (d+1)-regular",
                            module=_MOD, stage="audit")
    av = np.add.reduceat(planted_vec[final_graph.nbrs],
                         final_graph.offsets[:-1])
    residual = float(np.abs(av - lam * planted_vec).max())
    if residual > 1e-10:
        raise InternalError(f"planted residual {residual:.3e} exceeds 1e-10",
                            module=_MOD, stage="audit")

    # ---- localized set and report
    S1 = np.arange(ev_spec.level_offset(t - 1) + ev_spec.level_size(t - 1),
                   dtype=np.int64)
    S = np.concatenate([S1, vmap_union[state.n_t + S1]])
    mass = float((planted_vec[S] ** 2).sum())
    girth_cert = min(glue_floor, gadget_girth)

    report = ConstructionReport(
        d=d, epsilon=epsilon, k=k, t=t, D=depth_glue, lam=lam, theta=theta,
        mass_on_S=mass, girth=girth_cert, L=L,
        switches_used=len(state.switch_log), restarts=state.restarts,
        seed=seed, n=final_graph.n, set_size=len(S), n_leaves=n_leaves,
        glue_girth_floor=glue_floor, gadget_girth=gadget_girth,
        gadget_size=gadget_size, planted_residual=residual,
        entropy=eigenvector_entropy(planted_vec, d),
        sin4_theta=math.sin(theta) ** 4,
        eligible_counts=[r.eligible_count for r in state.switch_log],
        wall_clock_s=time.monotonic() - t0)
    return Construction(graph=final_graph,
                        planted=Eigenpair(value=lam, vector=planted_vec),
                        S=S, report=report, state=state,
                        vertex_map=vmap_union, gadget=gadget,
                        gadget_distinguished=dist_vertex)


def _relabel_distinguished_last(g: Graph, dist_vertex: int) -> np.ndarray:
    order = np.concatenate([np.arange(dist_vertex),
                            np.arange(dist_vertex + 1, g.n), [dist_vertex]])
    relabel = np.empty(g.n, dtype=np.int64)
    relabel[order] = np.arange(g.n)
    return relabel[g.edge_list()]


def _attach_and_plant(ev_spec, state, glue_graph, vmap_union, marked_new,
                      gadget, dist_vertex, gspec, profile, seed, cfg):
    """Replicate the gadget at every merged marked vertex and lay down the
    planted vector (values on the two trees, zero elsewhere)."""
    n_glue = glue_graph.n
    n_leaves = len(marked_new)
    n_g = gadget.n

    g_edges = _relabel_distinguished_last(gadget, dist_vertex)
    if cfg.share_gadget:
        designs = [g_edges] * n_leaves  # disjoint copies of one design
    else:
        designs = [g_edges]
        for c in range(1, n_leaves):
            gg, dv, _ = make_gadget(gspec, derive_seed(seed, "gadget", c))
            designs.append(_relabel_distinguished_last(gg, dv))

    # copy c occupies ids n_glue + c (n_g - 1) .. + (n_g - 2); its
    # distinguished vertex merges into marked_new[c]
    blocks = []
    for c in range(n_leaves):
        base = n_glue + c * (n_g - 1)
        e = designs[c]
        blocks.append(np.where(e == n_g - 1, marked_new[c], e + base))
    all_edges = np.vstack([glue_graph.edge_list()] + blocks)
    n_final = n_glue + n_leaves * (n_g - 1)
    final_graph = build_graph(n_final, all_edges)

    # planted vector: +f on T1 levels 0..depth_ev, -f on T2, 0 elsewhere
    x = profile.x / math.sqrt(2.0 * float(profile.m @ profile.m))
    vec = np.zeros(n_final)
    sizes = [ev_spec.level_size(i) for i in range(ev_spec.depth + 1)]
    tree_vals = np.repeat(x, sizes)
    n_ev = ev_spec.n
    vec[:n_ev] = tree_vals                       # T1 ids are unchanged
    t2_ids = vmap_union[state.n_t + np.arange(n_ev)]
    vec[t2_ids] = -tree_vals
    return final_graph, vec
