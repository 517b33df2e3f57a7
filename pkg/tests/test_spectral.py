"""Chebyshev operators, 1->inf norms, non-backtracking counts, Fejer kernel,
localizer polynomial properties, entropy."""

import math

import numpy as np
import pytest

from girthlab import corpus
from girthlab.eigensolver import adjacency_dense, dense_spectrum
from girthlab.errors import ValidationError
from girthlab.graph import distance, girth
from girthlab.spectral import (
    ChebyshevCoeffs,
    cheb_apply,
    cheb_norm_formula,
    chebyshev_T,
    chebyshev_U,
    eigenvector_entropy,
    fejer_eval,
    fejer_eval_cosine_sum,
    localizer_coeffs,
    localizer_norm_bound,
    localizer_quadratic_form,
    nonbacktracking_counts,
    op_norm_1_inf,
)


def dense_normalized(g):
    return adjacency_dense(g) / (2.0 * math.sqrt(g.declared_degree - 1))


def dense_poly(f: ChebyshevCoeffs, M: np.ndarray) -> np.ndarray:
    n = len(M)
    prev, cur = np.eye(n), M.copy()
    out = np.zeros_like(M)
    for k in range(1, f.degree + 1):
        if k >= 2:
            prev, cur = cur, 2.0 * M @ cur - prev
        if k % f.r == 0 and k // f.r <= f.m:
            out += f.coeffs[k // f.r - 1] * cur
    return out


# ---------------------------------------------------------------- cheb_apply

def test_cheb_apply_t0_identity():
    g = corpus.petersen()
    x = np.arange(10, dtype=float)
    assert np.array_equal(cheb_apply(g, 0, x), x)


def test_cheb_apply_t1_neighbors():
    g = corpus.petersen()
    e0 = np.zeros(10)
    e0[0] = 1.0
    y = cheb_apply(g, 1, e0)
    expect = np.zeros(10)
    expect[g.neighbors(0)] = 1.0 / (2.0 * math.sqrt(2))
    assert np.allclose(y, expect, atol=1e-15)


def test_cheb_apply_t2_petersen_entries():
    g = corpus.petersen()
    e0 = np.zeros(10)
    e0[0] = 1.0
    y = cheb_apply(g, 2, e0)
    for v in range(10):
        dist = distance(g, 0, v)
        expect = {0: -0.25, 1: 0.0, 2: 0.25}[dist]
        assert abs(y[v] - expect) < 1e-14


def test_cheb_apply_matches_dense_polynomial():
    g = corpus.heawood()
    M = dense_normalized(g)
    rng = np.random.default_rng(3)
    x = rng.standard_normal(g.n)
    for m in (0, 1, 2, 5, 8):
        ref = chebyshev_T_matrix(M, m) @ x
        assert np.allclose(cheb_apply(g, m, x), ref, atol=1e-12)


def chebyshev_T_matrix(M, m):
    n = len(M)
    prev, cur = np.eye(n), M.copy()
    if m == 0:
        return prev
    for _ in range(2, m + 1):
        prev, cur = cur, 2.0 * M @ cur - prev
    return cur


def test_cheb_apply_requires_regular():
    with pytest.raises(ValidationError, match="regular"):
        cheb_apply(corpus.path_graph(4), 2, np.zeros(4))


# ------------------------------------------------------------------ 1->inf

def test_t0_norm_is_one():
    assert op_norm_1_inf(corpus.petersen(), 0) == 1.0


def test_lemma_identity_petersen_heawood():
    for g in (corpus.petersen(), corpus.heawood()):
        d = g.declared_degree - 1
        got = op_norm_1_inf(g, 2)
        assert abs(got - cheb_norm_formula(d, 2)) <= 1e-10
        assert abs(got - 0.25) <= 1e-10


def test_heawood_t2_dense_crosscheck():
    g = corpus.heawood()
    M = dense_normalized(g)
    T2 = 2.0 * M @ M - np.eye(g.n)
    assert abs(np.abs(T2).max() - 0.25) < 1e-12


def test_norm_identity_all_even_m_below_half_girth():
    # C_n is excluded: the (d-1)/2d^{m/2} identity needs d >= 2
    for g in (corpus.petersen(), corpus.heawood()):
        d = g.declared_degree - 1
        gg = girth(g)
        for m in range(2, int(gg) // 2 + 1, 2):
            if m < gg / 2:
                assert abs(op_norm_1_inf(g, m) - cheb_norm_formula(d, m)) <= 1e-10


def test_op_norm_blocking_invariance():
    g = corpus.petersen()
    f = localizer_coeffs(0.5, 3, 2, 2)
    assert op_norm_1_inf(g, f, block=3) == op_norm_1_inf(g, f, block=64)


# --------------------------------------------------------- non-backtracking

def test_nb_m1_is_adjacency():
    g = corpus.petersen()
    B = nonbacktracking_counts(g, 1)
    assert np.array_equal(B, adjacency_dense(g).astype(np.int64))


def brute_nb_count(g, m, u, v):
    total = 0
    stack = [(u, -1, 0)]
    while stack:
        x, prev, k = stack.pop()
        if k == m:
            total += x == v
            continue
        for y in g.neighbors(x):
            if y != prev:
                stack.append((int(y), x, k + 1))
    return total


def test_nb_counts_match_bruteforce_petersen():
    g = corpus.petersen()
    for m in (2, 3, 4):
        B = nonbacktracking_counts(g, m)
        for u in (0, 3, 7):
            for v in range(10):
                assert B[u, v] == brute_nb_count(g, m, u, v)


def test_nb_diagonal_zero_below_girth():
    g = corpus.petersen()
    assert (np.diag(nonbacktracking_counts(g, 4)) == 0).all()


def test_nb_delta_property():
    # for m < g/2, B^(m)(u,v) = 1 iff dist(u,v) = m else 0
    for g in (corpus.petersen(), corpus.heawood()):
        gg = girth(g)
        m = 2
        assert m < gg / 2
        B = nonbacktracking_counts(g, m)
        for u in range(g.n):
            for v in range(g.n):
                assert B[u, v] == (1 if distance(g, u, v) == m else 0)


# ------------------------------------------------------------------- Fejer

def test_fejer_at_zero_and_pi():
    for m in (1, 2, 4, 8, 16):
        assert fejer_eval(m, 0.0) == m
    assert abs(fejer_eval(2, math.pi)) < 1e-15


def test_fejer_nonnegative_and_dual_formula():
    thetas = np.linspace(-7, 7, 1201)
    for m in (2, 3, 8, 13):
        a = fejer_eval(m, thetas)
        b = fejer_eval_cosine_sum(m, thetas)
        assert (a >= -1e-12).all()
        assert np.abs(a - b).max() < 1e-11


def test_fejer_f8_pi_over_3_crosscheck():
    a = fejer_eval(8, math.pi / 3)
    b = fejer_eval_cosine_sum(8, math.pi / 3)
    assert abs(a - b) <= 1e-12


# --------------------------------------------------------------- localizer

def test_localizer_rejects_odd_stride():
    with pytest.raises(ValidationError, match="even"):
        localizer_coeffs(0.5, 4, 3, 2)


def test_localizer_coefficients_range():
    f = localizer_coeffs(math.cos(math.pi / 3), 8, 2, 2)
    c = np.array(f.coeffs)
    assert (c >= 0).all() and (c <= 2).all()
    assert f.degree == 16


def test_localizer_figure_parameters():
    # m=8, r=2, phi=pi/3: value at the target eigenvalue clears m/4 - 1 = 1
    f = localizer_coeffs(0.5, 8, 2, 2)
    assert abs(f.phi - math.pi / 3) < 1e-15
    assert f.eval(0.5) >= 1.0
    assert f.eval_kernel(math.pi / 3) >= 1.0


def test_localizer_eval_routes_agree():
    thetas = np.linspace(1e-3, math.pi - 1e-3, 257)
    for lam_norm in (-0.9, 0.0, 0.5, 1.0):
        for (m, r) in ((4, 2), (8, 2), (5, 4)):
            f = localizer_coeffs(lam_norm, m, r, 2)
            a = f.eval(np.cos(thetas))
            b = f.eval_kernel(thetas)
            assert np.abs(a - b).max() < 1e-10


GRID_D = (2, 3, 4)
GRID_M = (4, 8, 16)
GRID_R = (2, 4)
GRID_PHI = tuple(k * math.pi / 12 for k in range(13))


@pytest.mark.parametrize("m", GRID_M)
@pytest.mark.parametrize("r", GRID_R)
def test_localizer_property_suite(m, r):
    xs = np.linspace(-1.0, 1.0, 10 ** 4)
    for d in GRID_D:
        for phi in GRID_PHI:
            f = localizer_coeffs(math.cos(phi), m, r, d)
            # (1) exact floor at the target eigenvalue via the kernel route
            assert f.eval_kernel(phi) >= m / 4 - 1
            # (2) bounded below by -1 on [-1, 1] (grid scan)
            assert f.eval(xs).min() >= -1.0 - 1e-9


def test_localizer_even_polynomial():
    xs = np.linspace(0, 1, 101)
    f = localizer_coeffs(0.3, 6, 2, 2)
    assert np.allclose(f.eval(xs), f.eval(-xs), atol=1e-12)


def test_localizer_outside_interval_uses_phi_zero():
    f = localizer_coeffs(1.7, 8, 2, 2)
    assert f.phi == 0.0
    # even-degree combinations grow outside [-1,1], so the floor holds
    assert f.eval(1.7) >= 8 / 4 - 1


def test_localizer_triangle_inequality_bound():
    # ||f(M)||_max <= sum c_j ||T_{jr}(M)||_max on any regular graph
    g = corpus.petersen()
    f = localizer_coeffs(0.5, 4, 2, 2)
    total = sum(f.coeffs[j - 1] * op_norm_1_inf(g, j * f.r)
                for j in range(1, f.m + 1))
    assert op_norm_1_inf(g, f) <= total + 1e-12


def test_localizer_norm_bound_formula():
    assert abs(localizer_norm_bound(2, 2) - 1.0) < 1e-15
    assert abs(localizer_norm_bound(3, 4) - 4.0 / 9.0) < 1e-15


# ----------------------------------------------------------- quadratic form

def test_quadratic_form_zero_vector():
    g = corpus.petersen()
    f = localizer_coeffs(0.5, 4, 2, 2)
    assert localizer_quadratic_form(g, f, np.zeros(10)) == 0.0


def test_quadratic_form_eigenvector_spectral_mapping():
    g = corpus.petersen()
    f = localizer_coeffs(0.5, 4, 2, 2)
    for p in dense_spectrum(g):
        lam_norm = p.value / (2.0 * math.sqrt(2))
        got = localizer_quadratic_form(g, f, p.vector)
        assert abs(got - f.eval(lam_norm)) < 1e-10


def test_quadratic_form_matches_dense_oracle():
    g = corpus.petersen()
    f = localizer_coeffs(-0.3, 5, 2, 2)
    F = dense_poly(f, dense_normalized(g))
    rng = np.random.default_rng(9)
    x = rng.standard_normal(10)
    x /= np.linalg.norm(x)
    assert abs(localizer_quadratic_form(g, f, x) - x @ F @ x) < 1e-10


def test_quadratic_form_warns_when_degree_too_large():
    g = corpus.petersen()
    f = localizer_coeffs(0.5, 4, 2, 2)
    with pytest.warns(UserWarning, match="girth"):
        localizer_quadratic_form(g, f, np.ones(10), girth_value=5)


# ------------------------------------------------- kind conversion / parity

def test_chebyshev_kind_conversion():
    xs = np.linspace(-1, 1, 200)
    for m in range(0, 41):
        lhs = chebyshev_T(m, xs)
        rhs = 0.5 * (chebyshev_U(m, xs) - chebyshev_U(m - 2, xs))
        assert np.abs(lhs - rhs).max() < 1e-10


def test_spectral_mapping_dense():
    g = corpus.heawood()
    f = localizer_coeffs(0.25, 4, 2, 2)
    F = dense_poly(f, dense_normalized(g))
    got = np.sort(np.linalg.eigvalsh(F))
    lam = np.array([p.value for p in dense_spectrum(g)])
    expect = np.sort(f.eval(lam / (2.0 * math.sqrt(2))))
    assert np.abs(got - expect).max() < 1e-8


# ----------------------------------------------------------------- entropy

def test_entropy_basis_vector():
    v = np.zeros(8)
    v[3] = 1.0
    assert eigenvector_entropy(v, 2) == 0.0


def test_entropy_uniform_vector():
    n, d = 64, 2
    v = np.full(n, 1.0 / math.sqrt(n))
    assert abs(eigenvector_entropy(v, d) - math.log(n, d)) < 1e-10


def test_entropy_requires_unit_norm():
    with pytest.raises(ValidationError):
        eigenvector_entropy(np.ones(4), 2)
