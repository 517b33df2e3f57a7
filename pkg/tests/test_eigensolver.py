"""Dense Householder+QL eigensolver against known spectra and numpy's eigh."""

import math

import numpy as np
import pytest

from girthlab import corpus
from girthlab.eigensolver import (
    adjacency_dense,
    dense_spectrum,
    dense_symmetric_eig,
    householder_tridiagonalize,
)
from girthlab.errors import BudgetError


def test_tridiagonalization_preserves_spectrum():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((30, 30))
    A = A + A.T
    d, e, Q = householder_tridiagonalize(A)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    assert np.allclose(Q.T @ A @ Q, T, atol=1e-10)
    assert np.allclose(Q @ Q.T, np.eye(30), atol=1e-12)


def test_c4_spectrum():
    vals = [p.value for p in dense_spectrum(corpus.cycle_graph(4))]
    assert np.allclose(vals, [-2.0, 0.0, 0.0, 2.0], atol=1e-10)


def test_star_spectrum():
    # K_{1,3}: eigenvalues -sqrt(3), 0, 0, sqrt(3) (hand-expanded 4x4
    # characteristic polynomial lambda^4 - 3 lambda^2)
    vals = [p.value for p in dense_spectrum(corpus.star_graph(3))]
    assert np.allclose(vals, [-math.sqrt(3), 0.0, 0.0, math.sqrt(3)], atol=1e-10)


def test_petersen_spectrum_multiplicities():
    g = corpus.petersen()
    pairs = dense_spectrum(g)
    vals = np.array([p.value for p in pairs])
    assert np.allclose(vals[:4], -2.0, atol=1e-8)
    assert np.allclose(vals[4:9], 1.0, atol=1e-8)
    assert np.allclose(vals[9], 3.0, atol=1e-8)
    # trace identities: sum lambda = 0, sum lambda^2 = 2m
    assert abs(vals.sum()) < 1e-8
    assert abs((vals ** 2).sum() - 2 * g.m) < 1e-7


def test_cycle_spectrum_against_circulant_formula():
    for n in (5, 12, 37):
        vals = np.array([p.value for p in dense_spectrum(corpus.cycle_graph(n))])
        assert np.allclose(vals, corpus.cn_eigenvalues(n), atol=1e-9)


def test_eigenpairs_are_orthonormal_and_accurate():
    g = corpus.heawood()
    A = adjacency_dense(g)
    pairs = dense_spectrum(g)
    V = np.column_stack([p.vector for p in pairs])
    assert np.allclose(V.T @ V, np.eye(g.n), atol=1e-9)
    for p in pairs:
        assert np.abs(A @ p.vector - p.value * p.vector).max() <= 1e-9


def test_agrees_with_numpy_eigh_on_random_symmetric():
    rng = np.random.default_rng(11)
    for n in (8, 40, 120):
        A = rng.standard_normal((n, n))
        A = A + A.T
        vals, vecs = dense_symmetric_eig(A)
        ref = np.linalg.eigvalsh(A)
        assert np.allclose(vals, ref, atol=1e-9 * n)
        assert np.abs(A @ vecs - vecs * vals).max() < 1e-9 * n


def test_dense_cap():
    with pytest.raises(BudgetError):
        dense_spectrum(corpus.cycle_graph(64), cap=10)
