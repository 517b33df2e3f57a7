"""d-ary trees, their symmetric (level-constant) eigenpairs via the level
recurrence, per-level mass profiles, and the empirical density sweep.

A depth-D tree has levels 0..D with |S_0| = 1 and |S_i| = (d+1) d^{i-1};
the root and every internal vertex have degree d+1. Level-j vertex r has
children r*d + 0..d-1 at level j+1 (the root's children are 0..d), so
ancestor arithmetic is pure integer division and no parent arrays are
needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ValidationError
from .graph import Graph, build_graph

_MOD = "tree-spectra"

TREE_SIZE_CAP = 3 * 10 ** 7


@dataclass(frozen=True)
class TreeSpec:
    d: int
    depth: int

    def __post_init__(self):
        if self.d < 2 or self.depth < 1:
            raise ValidationError("need branching d >= 2 and depth >= 1",
                                  module=_MOD, stage="spec")

    def level_size(self, i: int) -> int:
        return 1 if i == 0 else (self.d + 1) * self.d ** (i - 1)

    def level_offset(self, i: int) -> int:
        """Vertex id of the first vertex in level i."""
        if i == 0:
            return 0
        return 1 + (self.d + 1) * (self.d ** (i - 1) - 1) // (self.d - 1)

    @property
    def n(self) -> int:
        return self.level_offset(self.depth) + self.level_size(self.depth)

    def levels(self) -> np.ndarray:
        """Per-vertex level side-array."""
        return np.repeat(np.arange(self.depth + 1),
                         [self.level_size(i) for i in range(self.depth + 1)])

    def parents(self) -> np.ndarray:
        """Per-vertex parent id (root maps to -1)."""
        out = np.full(self.n, -1, dtype=np.int64)
        for i in range(1, self.depth + 1):
            off, sz = self.level_offset(i), self.level_size(i)
            idx = np.arange(sz, dtype=np.int64)
            up = idx // self.d if i > 1 else np.zeros_like(idx)
            out[off:off + sz] = self.level_offset(i - 1) + up
        return out


def build_dary_tree(spec: TreeSpec):
    """Tree graph plus the per-vertex level array."""
    if spec.n > TREE_SIZE_CAP:
        raise BudgetError(f"tree would have {spec.n} vertices", module=_MOD,
                          stage="build_dary_tree")
    par = spec.parents()
    child = np.arange(spec.n, dtype=np.int64)[par >= 0]
    edges = np.column_stack([par[par >= 0], child])
    return build_graph(spec.n, edges), spec.levels()


@dataclass(frozen=True)
class LevelProfile:
    """Per-level values x_i and mass amplitudes m_i = sqrt(|S_i|) x_i of a
    symmetric eigenvector candidate, normalized to x_0 = 1."""

    spec: TreeSpec
    lam: float
    x: np.ndarray
    m: np.ndarray

    @property
    def theta(self) -> float:
        return math.acos(max(-1.0, min(1.0, self.lam / (2.0 * math.sqrt(self.spec.d)))))


def level_recurrence(lam: float, spec: TreeSpec) -> LevelProfile:
    """Propagate the eigenvector equation level by level from x_0 = 1.

    lam x_0 = (d+1) x_1 and lam x_i = x_{i-1} + d x_{i+1} for i < D; the
    leaf equation is deliberately NOT imposed here (see char_residual).
    """
    d, D = spec.d, spec.depth
    x = np.empty(D + 1)
    x[0] = 1.0
    x[1] = lam / (d + 1)
    for i in range(1, D):
        x[i + 1] = (lam * x[i] - x[i - 1]) / d
    sizes = np.array([spec.level_size(i) for i in range(D + 1)], dtype=np.float64)
    m = np.sqrt(sizes) * x
    return LevelProfile(spec=spec, lam=lam, x=x, m=m)


def mass_recurrence(lam: float, spec: TreeSpec) -> np.ndarray:
    """The m_i computed directly in mass coordinates; dual path to
    level_recurrence.

    m_1 = lam/sqrt(d+1) and m_{i+1} = (lam/sqrt d) m_i - m_{i-1} for i >= 2.
    The first step carries the factor sqrt(|S_2|/|S_0|)/d = sqrt((d+1)/d)
    on m_0 because the root level is smaller by d/(d+1) than the geometric
    progression of the deeper levels.
    """
    d, D = spec.d, spec.depth
    m = np.empty(D + 1)
    m[0] = 1.0
    m[1] = lam / math.sqrt(d + 1)
    c = lam / math.sqrt(d)
    if D >= 2:
        m[2] = c * m[1] - math.sqrt((d + 1) / d) * m[0]
    for i in range(2, D):
        m[i + 1] = c * m[i] - m[i - 1]
    return m


def char_residual(lam: float, spec: TreeSpec) -> float:
    """Leaf boundary equation residual in mass coordinates.

    A leaf sees only its parent, so lam x_D = x_{D-1}; scaled by
    sqrt(|S_D|) this is lam*m_D - sqrt(|S_D|/|S_{D-1}|)*m_{D-1}, with the
    size ratio d for D >= 2 and d+1 when the previous level is the root.
    Zeros of this residual in lam are exactly the symmetric eigenvalues.
    """
    m = mass_recurrence(lam, spec)
    ratio = spec.d if spec.depth >= 2 else spec.d + 1
    return lam * m[spec.depth] - math.sqrt(ratio) * m[spec.depth - 1]


def find_symmetric_eigenvalues(spec: TreeSpec, interval=None,
                               grid_per_level: int = 16) -> list:
    """All symmetric eigenvalues in `interval` (default: the full tempered
    interval), by sign-change bisection of char_residual on a theta grid.

    Zeros are near-uniformly spaced in theta = arccos(lam / 2 sqrt d), so a
    grid of 16 (D+1) points brackets every root; each bracket is bisected to
    floating-point collapse. Over the full interval the count is D+1.
    """
    d = spec.d
    edge = 2.0 * math.sqrt(d)
    if interval is None:
        a, b = -edge, edge
    else:
        a, b = float(interval[0]), float(interval[1])
        if not (-edge <= a < b <= edge):
            raise ValidationError(
                f"interval [{a}, {b}] is not inside the tempered interval "
                f"(-2 sqrt d, 2 sqrt d) = (-{edge:.6f}, {edge:.6f})",
                module=_MOD, stage="find_symmetric_eigenvalues")
    tiny = 1e-9  # the endpoints theta = 0, pi are excluded (tempered interior)
    th_lo = tiny if b >= edge else math.acos(max(-1.0, min(1.0, b / edge)))
    th_hi = math.pi - tiny if a <= -edge else math.acos(max(-1.0, min(1.0, a / edge)))
    npts = grid_per_level * (spec.depth + 1)
    # pad by one grid step so roots sitting exactly on the requested
    # endpoints are still bracketed, then filter afterwards
    step = (th_hi - th_lo) / max(npts - 1, 1)
    th_lo = max(tiny, th_lo - step)
    th_hi = min(math.pi - tiny, th_hi + step)
    thetas = np.linspace(th_lo, th_hi, npts + 2)
    npts = npts + 2
    lams = edge * np.cos(thetas)
    res = np.array([char_residual(l, spec) for l in lams])

    roots = []
    for i in range(npts - 1):
        r0, r1 = res[i], res[i + 1]
        if r0 == 0.0:
            roots.append(lams[i])
            continue
        if r0 * r1 < 0.0:
            t0, t1 = thetas[i], thetas[i + 1]
            f0 = r0
            for _ in range(200):
                tm = 0.5 * (t0 + t1)
                if tm == t0 or tm == t1:
                    break
                fm = char_residual(edge * math.cos(tm), spec)
                if fm == 0.0:
                    t0 = t1 = tm
                    break
                if f0 * fm < 0.0:
                    t1 = tm
                else:
                    t0, f0 = tm, fm
            roots.append(edge * math.cos(0.5 * (t0 + t1)))
    if res[-1] == 0.0:
        roots.append(lams[-1])
    pad = 1e-9 * edge
    roots = [r for r in roots if a - pad <= r <= b + pad]
    roots.sort()
    return roots


@dataclass(frozen=True)
class SymmetricEigenpair:
    lam: float
    theta: float
    profile: LevelProfile
    vector: np.ndarray  # unit vector on the tree graph, level-constant


def symmetric_eigenvector(spec: TreeSpec, lam: float,
                          residual_tol: float = 1e-10) -> SymmetricEigenpair:
    """Full normalized symmetric eigenvector for an eigenvalue of the tree."""
    prof = level_recurrence(lam, spec)
    scale = float(np.abs(prof.m).max())
    if abs(char_residual(lam, spec)) > residual_tol * max(1.0, scale):
        raise ValidationError(
            f"lambda={lam} is not a symmetric eigenvalue "
            f"(leaf residual {char_residual(lam, spec):.3e})",
            module=_MOD, stage="symmetric_eigenvector")
    nrm = math.sqrt(float(prof.m @ prof.m))
    values = prof.x / nrm
    vec = np.repeat(values, [spec.level_size(i) for i in range(spec.depth + 1)])
    return SymmetricEigenpair(lam=lam, theta=prof.theta, profile=prof, vector=vec)


def mass_profile(pair: SymmetricEigenpair) -> np.ndarray:
    """Per-level ell_2^2 masses of the normalized eigenvector (sums to 1)."""
    m2 = pair.profile.m ** 2
    return m2 / m2.sum()


def top_levels_set(spec: TreeSpec, t: int) -> np.ndarray:
    """Vertex ids of levels 0..t-1."""
    if not (1 <= t <= spec.depth + 1):
        raise ValidationError(f"t={t} outside 1..{spec.depth + 1}",
                              module=_MOD, stage="top_levels_set")
    return np.arange(spec.level_offset(t - 1) + spec.level_size(t - 1),
                     dtype=np.int64)


def transfer_pairs(profile: LevelProfile) -> np.ndarray:
    """w_i = (m_i, m_{i-1}) for i = 1..D, the transfer-matrix state."""
    m = profile.m
    return np.column_stack([m[1:], m[:-1]])


def density_sweep(d: int, depth_max: int, depth_min: int = 2) -> dict:
    """Union of symmetric eigenvalues over depths [depth_min, depth_max] and
    the largest gap the union leaves in the tempered interval."""
    edge = 2.0 * math.sqrt(d)
    values = []
    per_depth = {}
    for D in range(depth_min, depth_max + 1):
        vals = find_symmetric_eigenvalues(TreeSpec(d, D))
        per_depth[D] = vals
        values.extend(vals)
    values.sort()
    pts = np.array([-edge] + values + [edge])
    gaps = np.diff(pts)
    i = int(np.argmax(gaps))
    return {
        "d": d,
        "depth_min": depth_min,
        "depth_max": depth_max,
        "count": len(values),
        "largest_gap": float(gaps[i]),
        "largest_gap_interval": (float(pts[i]), float(pts[i + 1])),
        "eigenvalues": values,
        "per_depth": per_depth,
    }
