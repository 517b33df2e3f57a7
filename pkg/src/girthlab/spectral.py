"""Chebyshev polynomials of the normalized adjacency operator A/(2*sqrt(d)),
non-backtracking walk counts, 1->inf operator norms, the Fejer-kernel
localizer polynomial, and eigenvector entropy.

All operator applications work in the normalized variable x = A/(2*sqrt(d));
eigenvalues are stored unnormalized and converted at call sites through
`normalize_eigenvalue`, the single conversion point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ValidationError
from .graph import Graph

_MOD = "spectral-ops"

NB_DENSE_CAP = 4096


def branching_parameter(G: Graph) -> int:
    """d such that G is (d+1)-regular; error when G is not regular."""
    if G.declared_degree is None:
        raise ValidationError(
            "graph is not regular; the normalization 2*sqrt(d) is undefined",
            module=_MOD, stage="regularity")
    return G.declared_degree - 1


def normalize_eigenvalue(lam: float, d: int) -> float:
    return lam / (2.0 * math.sqrt(d))


def _adjacency_apply(G: Graph, x: np.ndarray) -> np.ndarray:
    """A @ x for a vector or an (n, b) block, via neighbor gathers."""
    if x.ndim == 1:
        return np.add.reduceat(x[G.nbrs], G.offsets[:-1])
    return np.add.reduceat(x[G.nbrs, :], G.offsets[:-1], axis=0)


def cheb_apply(G: Graph, m: int, x: np.ndarray) -> np.ndarray:
    """T_m(A/(2 sqrt d)) @ x by the three-term recurrence.

    Only sparse matrix-vector products are used; the dense operator is
    never materialized. Works on a single vector or an (n, b) column block.
    """
    d = branching_parameter(G)
    if m < 0:
        raise ValidationError("Chebyshev degree must be >= 0", module=_MOD,
                              stage="cheb_apply")
    x = np.asarray(x, dtype=np.float64)
    if m == 0:
        return x.copy()
    inv = 1.0 / (2.0 * math.sqrt(d))
    prev = x
    cur = _adjacency_apply(G, x) * inv
    for _ in range(2, m + 1):
        prev, cur = cur, _adjacency_apply(G, cur) * (2.0 * inv) - prev
    return cur


@dataclass(frozen=True)
class ChebyshevCoeffs:
    """The localizer polynomial f(x) = sum_j c_j T_{j r}(x), j = 1..m.

    c_j = (1 - j/m) (cos(j r phi) + 1) >= 0; total degree m*r; phi is the
    angle of the target eigenvalue on the normalized scale.
    """

    d: int
    r: int
    m: int
    phi: float
    coeffs: tuple

    @property
    def degree(self) -> int:
        return self.m * self.r

    def eval(self, x) -> np.ndarray | float:
        """Evaluate f at scalar or array x via the Chebyshev recurrence."""
        arr = np.asarray(x, dtype=np.float64)
        prev = np.ones_like(arr)
        cur = arr.copy()
        out = np.zeros_like(arr)
        for k in range(1, self.degree + 1):
            if k >= 2:
                prev, cur = cur, 2.0 * arr * cur - prev
            if k % self.r == 0 and k // self.r <= self.m:
                out += self.coeffs[k // self.r - 1] * cur
        return float(out) if np.isscalar(x) else out

    def eval_kernel(self, theta) -> np.ndarray | float:
        """Evaluate f(cos theta) through the Fejer-kernel form
        (K_phi(theta) + K_0(theta)) / 2; nonnegativity of each kernel term
        is explicit in this route, so the m/4 - 1 floor is exact."""
        th = np.asarray(theta, dtype=np.float64)
        kphi = 0.5 * (fejer_eval(self.m, self.r * (th - self.phi))
                      + fejer_eval(self.m, self.r * (th + self.phi))) - 1.0
        k0 = fejer_eval(self.m, self.r * th) - 1.0
        out = 0.5 * (kphi + k0)
        return float(out) if np.isscalar(theta) else out


def fejer_eval(m: int, theta) -> np.ndarray | float:
    """Fejer kernel F_m(theta) = 1 + 2 sum_{j<m} (1 - j/m) cos(j theta).

    Evaluated through the closed form sin^2(m theta/2) / (m sin^2(theta/2)),
    which is nonnegative by construction; near theta = 0 (mod 2 pi) the
    cosine sum is used instead to avoid 0/0.
    """
    if m < 1:
        raise ValidationError("Fejer order must be >= 1", module=_MOD,
                              stage="fejer_eval")
    th = np.asarray(theta, dtype=np.float64)
    half = 0.5 * th
    s = np.sin(half)
    near0 = np.abs(s) < 1e-8
    s_safe = np.where(near0, 1.0, s)
    closed = np.sin(m * half) ** 2 / (m * s_safe ** 2)
    if np.any(near0):
        j = np.arange(1, m + 1, dtype=np.float64)
        cosine = 1.0 + 2.0 * np.sum(
            (1.0 - j / m)[:, None] * np.cos(j[:, None] * np.atleast_1d(th)[None, :]),
            axis=0).reshape(th.shape)
        closed = np.where(near0, cosine, closed)
    return float(closed) if np.isscalar(theta) else closed


def fejer_eval_cosine_sum(m: int, theta) -> np.ndarray | float:
    """Cosine-sum form of F_m; cross-check partner for `fejer_eval`."""
    th = np.atleast_1d(np.asarray(theta, dtype=np.float64))
    j = np.arange(1, m + 1, dtype=np.float64)
    out = 1.0 + 2.0 * np.sum((1.0 - j / m)[:, None] * np.cos(j[:, None] * th[None, :]),
                             axis=0)
    return float(out[0]) if np.isscalar(theta) else out.reshape(np.shape(theta))


def localizer_coeffs(lambda_norm: float, m: int, r: int, d: int) -> ChebyshevCoeffs:
    """Localizer polynomial for a target eigenvalue on the normalized scale.

    phi = arccos(lambda_norm) when lambda_norm lies in [-1, 1]; outside that
    interval the phi = 0 polynomial (the lambda = 1 localizer) is returned,
    and the m/4 - 1 floor still holds because f is a nonnegative combination
    of even-degree Chebyshev polynomials, increasing on [1, inf).
    """
    if r <= 0 or r % 2 != 0:
        raise ValidationError(
            f"stride r={r} must be even and positive (even degrees keep the "
            "polynomial nonnegative outside [-1, 1])",
            module=_MOD, stage="localizer_coeffs")
    if m < 1:
        raise ValidationError("term count m must be >= 1", module=_MOD,
                              stage="localizer_coeffs")
    if -1.0 <= lambda_norm <= 1.0:
        phi = math.acos(lambda_norm)
    else:
        phi = 0.0
    j = np.arange(1, m + 1, dtype=np.float64)
    c = (1.0 - j / m) * (np.cos(j * r * phi) + 1.0)
    return ChebyshevCoeffs(d=d, r=r, m=m, phi=phi, coeffs=tuple(float(v) for v in c))


def _cheb_block_max(G: Graph, degree: int, collect: dict, block: int = 256) -> float:
    """Max abs entry over columns of sum_k collect[k] * T_k(A/2 sqrt d).

    Runs the recurrence on identity blocks; `collect` maps degree -> weight.
    """
    d = branching_parameter(G)
    inv = 1.0 / (2.0 * math.sqrt(d))
    n = G.n
    best = 0.0
    for j0 in range(0, n, block):
        b = min(block, n - j0)
        prev = np.zeros((n, b))
        prev[j0 + np.arange(b), np.arange(b)] = 1.0
        acc = collect.get(0, 0.0) * prev if 0 in collect else np.zeros((n, b))
        if degree >= 1:
            cur = _adjacency_apply(G, prev) * inv
            if 1 in collect:
                acc += collect[1] * cur
            for k in range(2, degree + 1):
                prev, cur = cur, _adjacency_apply(G, cur) * (2.0 * inv) - prev
                if k in collect:
                    acc += collect[k] * cur
        best = max(best, float(np.abs(acc).max(initial=0.0)))
    return best


def op_norm_1_inf(G: Graph, p: ChebyshevCoeffs | int, block: int = 256) -> float:
    """Exact 1->inf norm (maximum absolute matrix entry) of p(A/(2 sqrt d)).

    `p` is either a ChebyshevCoeffs localizer or an integer m meaning the
    single polynomial T_m. Computed by applying the operator to every basis
    vector in column blocks; the max is order-free so blocking cannot change
    the result.
    """
    if isinstance(p, ChebyshevCoeffs):
        collect = {jj * p.r: p.coeffs[jj - 1] for jj in range(1, p.m + 1)}
        degree = p.degree
    else:
        degree = int(p)
        collect = {degree: 1.0}
    return _cheb_block_max(G, degree, collect, block=block)


def cheb_norm_formula(d: int, m: int) -> float:
    """(d-1) / (2 d^{m/2}): the exact 1->inf norm of T_m(A/2 sqrt d) on a
    (d+1)-regular graph when m is even and m < g/2."""
    return (d - 1) / (2.0 * d ** (m / 2.0))


def localizer_norm_bound(d: int, r: int) -> float:
    """2(d-1)/d^{r/2}: upper bound for the localizer's 1->inf norm when
    its degree m*r stays below g/2."""
    return 2.0 * (d - 1) / d ** (r / 2.0)


def localizer_quadratic_form(G: Graph, f: ChebyshevCoeffs, x: np.ndarray,
                             girth_value: float | None = None) -> float:
    """<x, f(A/(2 sqrt d)) x> in one pass of the Chebyshev recurrence."""
    d = branching_parameter(G)
    if girth_value is not None and f.degree >= girth_value / 2.0:
        warnings.warn(
            f"localizer degree {f.degree} is not below girth/2 = "
            f"{girth_value / 2:.1f}; hypercontractivity is not guaranteed",
            stacklevel=2)
    x = np.asarray(x, dtype=np.float64)
    inv = 1.0 / (2.0 * math.sqrt(d))
    total = 0.0
    prev = x
    cur = _adjacency_apply(G, x) * inv
    for k in range(1, f.degree + 1):
        if k >= 2:
            prev, cur = cur, _adjacency_apply(G, cur) * (2.0 * inv) - prev
        if k % f.r == 0 and k // f.r <= f.m:
            total += f.coeffs[k // f.r - 1] * float(x @ cur)
    return total


def nonbacktracking_counts(G: Graph, m: int, cap: int = NB_DENSE_CAP) -> np.ndarray:
    """Dense integer matrix of non-backtracking walk counts of length m.

    B^(1) = A, B^(2) = A^2 - (d+1) I, B^(k) = A B^(k-1) - d B^(k-2).
    Entries are exact int64 walk counts; a growth check guards overflow.
    """
    d = branching_parameter(G)
    if G.n > cap:
        raise BudgetError(f"n={G.n} exceeds non-backtracking dense cap {cap}",
                          module=_MOD, stage="nonbacktracking_counts")
    if m < 1:
        raise ValidationError("walk length must be >= 1", module=_MOD,
                              stage="nonbacktracking_counts")
    A = np.zeros((G.n, G.n), dtype=np.int64)
    src = np.repeat(np.arange(G.n), G.degrees())
    A[src, G.nbrs] = 1
    if m == 1:
        return A
    prev = A
    cur = A @ A - (d + 1) * np.eye(G.n, dtype=np.int64)
    limit = np.iinfo(np.int64).max // (2 * (d + 1) * max(G.n, 1))
    for _ in range(3, m + 1):
        if cur.max() > limit:
            raise BudgetError("non-backtracking counts would overflow int64",
                              module=_MOD, stage="nonbacktracking_counts")
        prev, cur = cur, A @ cur - d * prev
    return cur


def eigenvector_entropy(v: np.ndarray, d: int) -> float:
    """Shannon entropy -sum v_x^2 log_d v_x^2 of a unit vector, 0 log 0 := 0."""
    v = np.asarray(v, dtype=np.float64)
    nrm = float(v @ v)
    if abs(nrm - 1.0) > 1e-9:
        raise ValidationError(f"vector norm^2 = {nrm:.12f} is not 1 +- 1e-9",
                              module=_MOD, stage="eigenvector_entropy")
    p = v * v
    nz = p > 0.0
    return float(-(p[nz] * (np.log(p[nz]) / math.log(d))).sum())


def chebyshev_T(m: int, x) -> np.ndarray | float:
    """Scalar/array Chebyshev T_m via the recurrence (test helper)."""
    arr = np.asarray(x, dtype=np.float64)
    prev = np.ones_like(arr)
    if m == 0:
        return float(prev) if np.isscalar(x) else prev
    cur = arr.copy()
    for _ in range(2, m + 1):
        prev, cur = cur, 2.0 * arr * cur - prev
    return float(cur) if np.isscalar(x) else cur


def chebyshev_U(m: int, x) -> np.ndarray | float:
    """Chebyshev U_m with U_{-1} = 0, U_{-2} = -1."""
    arr = np.asarray(x, dtype=np.float64)
    if m == -2:
        out = -np.ones_like(arr)
    elif m == -1:
        out = np.zeros_like(arr)
    else:
        prev = np.ones_like(arr)
        if m == 0:
            out = prev
        else:
            cur = 2.0 * arr
            for _ in range(2, m + 1):
                prev, cur = cur, 2.0 * arr * cur - prev
            out = cur
    return float(out) if np.isscalar(x) else out
