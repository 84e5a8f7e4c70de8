import json
from math import comb

import numpy as np
import pytest

from catrecip.fields import DEFAULT_PRIMES, GF, QQ
from catrecip.linalg import rank
from catrecip.spaces import (CatSpace, SizeError, build_cat_space, membership, monomials,
                             orthogonal_basis, point_from_monomials, rank_r_point,
                             secant_dimension, sym_index, sym_to_vec, vec_to_sym,
                             veronese_point)


@pytest.mark.parametrize("k,n,m,dim", [(2, 1, 3, 5), (2, 2, 6, 15), (3, 2, 10, 28),
                                       (4, 1, 5, 9)])
def test_dimensions(k, n, m, dim):
    s = build_cat_space(k, n)
    assert (s.m, s.dim) == (m, dim)
    assert s.dim == comb(2 * k + n, n)
    assert s.codim == s.sym_dim - s.dim


def test_cat23_codimension_is_six(cat23):
    assert cat23.codim == 6


def test_monomials_graded_lex():
    assert monomials(3, 2) == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]


def test_hankel_structure_of_binary_quartic(cat22):
    # rows x^2, xy, y^2: entry (i, j) is a_{i+j} for a binary quartic
    labels = [cat22.coeff_labels[a] for a in cat22.index.ravel()]
    assert [l[1] for l in labels] == [0, 1, 2, 1, 2, 3, 2, 3, 4]


def test_entries_follow_exponent_sums(cat23):
    for i, beta in enumerate(cat23.row_labels):
        for j, gamma in enumerate(cat23.row_labels):
            alpha = tuple(b + g for b, g in zip(beta, gamma))
            assert cat23.coeff_labels[cat23.index[i, j]] == alpha


def test_size_guard():
    with pytest.raises(SizeError):
        build_cat_space(5, 5, max_dim=100)


def test_sym_vec_roundtrip():
    M = np.arange(36).reshape(6, 6)
    M = M + M.T
    v = sym_to_vec(M)
    assert len(v) == 21 and np.array_equal(vec_to_sym(v), M)
    assert sym_index(3)[:3] == [(0, 0), (0, 1), (0, 2)]


def test_veronese_point_has_rank_one(cat23):
    A = veronese_point(cat23, [1, 2, 3], QQ)
    assert rank(A.matrix, QQ) == 1
    assert A.matrix[0, 0] == 1


@pytest.mark.parametrize("r", [1, 2, 3, 4, 5, 6])
def test_rank_r_point_rank(cat23, rng, r):
    F = GF(DEFAULT_PRIMES[0])
    A = rank_r_point(cat23, r, rng, F)
    assert rank(A.matrix, F) == r


def test_membership(cat23, rng):
    A = rank_r_point(cat23, 3, rng, QQ)
    ok, coeffs = membership(cat23, A.matrix, QQ)
    assert ok and np.array_equal(coeffs, A.coeffs)
    M = A.matrix.copy()
    M[0, 4] += 1
    M[4, 0] += 1
    assert membership(cat23, M, QQ) == (False, None)


def test_orthogonal_basis_is_orthogonal(cat23):
    W = orthogonal_basis(cat23, QQ)
    assert len(W) == 6
    for Y in W:
        for E in cat23.basis:
            assert np.sum(Y * E) == 0


def test_point_from_monomials(cat23):
    A = point_from_monomials(cat23, {(4, 0, 0): 1, (0, 0, 4): 1})
    assert rank(A.matrix, QQ) == 2


@pytest.mark.parametrize("r,want", [(1, 2), (2, 5), (3, 8), (4, 11), (5, 13)])
def test_secant_dimensions_cat23(cat23, r, want):
    assert secant_dimension(cat23, r) == want


def test_secant_dimension_binary_quartic(cat22):
    # rank one: the rational normal curve; rank two fills P^4 up to the determinant
    assert secant_dimension(cat22, 1) == 1
    assert secant_dimension(cat22, 2) == 3


def test_json_roundtrip(cat23):
    text = cat23.to_json()
    back = CatSpace.from_json(text)
    assert back.m == 6 and np.array_equal(back.index, cat23.index)
    assert json.loads(text)["dim"] == 15


def test_rank_bounds(cat23, rng):
    with pytest.raises(ValueError):
        rank_r_point(cat23, 7, rng)
    with pytest.raises(ValueError):
        secant_dimension(cat23, 0)
