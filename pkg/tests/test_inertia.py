"""Tests pour le comptage d'inertie (loi de Sylvester)."""

import math

import numpy as np
import scipy.sparse as sp

from indexlab.services.inertia import dense_inertia, inertia, negative_inertia, sparse_inertia


def _tridiagonal(n, shift):
    main = np.full(n, 2.0 - shift)
    off = np.full(n - 1, -1.0)
    return sp.diags([off, main, off], [-1, 0, 1], format="csc")


def test_diagonal():
    """diag(1, -1, -2) : deux valeurs propres négatives."""
    assert negative_inertia(np.diag([1.0, -1.0, -2.0])) == 2


def test_zero_eigenvalue_counted():
    result = dense_inertia(np.diag([1.0, 0.0, -1.0]))
    assert (result.negative, result.zero, result.positive) == (1, 1, 1)


def test_dense_matches_eigenvalues():
    """Matrice symétrique aléatoire : inertie = signes du spectre."""
    rng = np.random.default_rng(7)
    Q, _ = np.linalg.qr(rng.normal(size=(40, 40)))
    eigs = np.concatenate([-rng.uniform(0.5, 2.0, 13), rng.uniform(0.5, 2.0, 27)])
    A = Q @ np.diag(eigs) @ Q.T
    A = 0.5 * (A + A.T)
    result = inertia(A)
    assert result.negative == 13
    assert result.positive == 27
    assert result.method == "bunch-kaufman"


def test_two_by_two_blocks():
    """Une matrice sans diagonale force les pivots 2×2."""
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    result = dense_inertia(A)
    assert (result.negative, result.positive) == (1, 1)


def test_sparse_laplacian_count():
    """Laplacien 1D décalé : compte exact des valeurs propres sous le décalage."""
    n, shift = 1500, 0.5
    A = _tridiagonal(n, shift)
    k = np.arange(1, n + 1)
    expected = int(np.sum(2.0 - 2.0 * np.cos(k * math.pi / (n + 1)) < shift))
    assert inertia(A).negative == expected
    assert sparse_inertia(A).negative == expected


def test_empty_matrix():
    result = dense_inertia(np.zeros((0, 0)))
    assert result.to_dict()["negative"] == 0
