"""Poisson matrices, leaves, and the foliation bookkeeping."""

import warnings
from fractions import Fraction

import numpy as np
import pytest

from carnot.algebra import AlgebraShape
from carnot.coadjoint import (
    CovectorPoint,
    leaf_through,
    linear_integral,
    poisson_matrix,
    rank_and_kernel,
    same_leaf,
)


def _random_point(rng, k):
    n2 = k * (k - 1) // 2
    return CovectorPoint(rng.normal(size=k), rng.normal(size=n2))


def test_covector_point_basics():
    p = CovectorPoint([1.0, 2.0], [3.0])
    assert p.k == 2
    assert not p.exact
    assert p.pair(1, 2) == 3.0
    assert p.pair(2, 1) == -3.0
    q = CovectorPoint([Fraction(1, 2), Fraction(1)], [Fraction(-2, 3)])
    assert q.exact
    qf = q.as_float()
    assert not qf.exact
    assert qf.h[0] == 0.5
    with pytest.raises(ValueError):
        CovectorPoint([1.0, np.nan], [0.0])
    with pytest.raises(ValueError):
        CovectorPoint([1.0, 0.0], [0.0, 0.0])


def test_poisson_matrix_layout():
    shape = AlgebraShape(3)
    h2 = np.array([3.0, 5.0, 7.0])
    p = CovectorPoint(np.zeros(3), h2)
    m = poisson_matrix(p)
    expected = np.array([
        [0.0, 3.0, 5.0],
        [-3.0, 0.0, 7.0],
        [-5.0, -7.0, 0.0],
    ])
    assert np.array_equal(m, expected)
    assert np.array_equal(m, -m.T)
    for i, j in shape.pairs():
        assert m[i - 1, j - 1] == h2[shape.pair_index(i, j)]


def test_poisson_matrix_exact_mode():
    h2 = [Fraction(1, 3), Fraction(-2, 7), Fraction(5, 11)]
    p = CovectorPoint([Fraction(0)] * 3, h2)
    m = poisson_matrix(p)
    assert m.dtype == object
    assert m[0, 1] == Fraction(1, 3)
    assert m[1, 0] == Fraction(-1, 3)
    assert all(m[i, i] == 0 for i in range(3))


def test_rank_is_even_and_kernel_orthonormal():
    rng = np.random.default_rng(23)
    for k in range(2, 7):
        for _ in range(20):
            p = _random_point(rng, k)
            m = poisson_matrix(p)
            rank, kernel = rank_and_kernel(m)
            assert rank % 2 == 0
            assert kernel.shape == (k, k - rank)
            if kernel.size:
                gram = kernel.T @ kernel
                assert np.allclose(gram, np.eye(k - rank), atol=1e-12)
                assert np.allclose(m @ kernel, 0.0, atol=1e-12)


def test_odd_thresholded_rank_is_repaired():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rank, kernel = rank_and_kernel(np.eye(3))
        assert rank == 2
        assert kernel.shape == (3, 1)
        assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_k3_kernel_direction():
    # for k = 3 the kernel of the Poisson matrix is spanned by
    # (h23, -h13, h12)
    rng = np.random.default_rng(5)
    for _ in range(20):
        h2 = rng.normal(size=3)
        p = CovectorPoint(np.zeros(3), h2)
        _, kernel = rank_and_kernel(poisson_matrix(p))
        expected = np.array([h2[2], -h2[1], h2[0]])
        expected = expected / np.linalg.norm(expected)
        assert abs(abs(kernel[:, 0] @ expected) - 1.0) < 1e-12


def test_leaf_through_geometry():
    rng = np.random.default_rng(41)
    for k in (2, 3, 4, 5):
        for _ in range(10):
            p = _random_point(rng, k)
            lf = leaf_through(p)
            m = poisson_matrix(p)
            rank, kernel = rank_and_kernel(m)
            assert lf.dim == rank
            d = lf.directions
            assert d.shape == (k, rank)
            assert np.allclose(d.T @ d, np.eye(rank), atol=1e-12)
            if kernel.size:
                assert np.allclose(d.T @ kernel, 0.0, atol=1e-12)
            # base point sits on its own leaf
            assert same_leaf(p, lf)


def test_leaf_plane_coordinates_round_trip():
    rng = np.random.default_rng(2)
    p = _random_point(rng, 4)
    lf = leaf_through(p)
    ys = rng.normal(size=(12, lf.dim))
    hs = lf.point_at(ys)
    back = lf.plane_coords(hs)
    assert np.allclose(back, ys, atol=1e-12)


def test_leaf_orientation_convention():
    # for 2-dimensional leaves the frame satisfies d1' M d2 >= 0
    rng = np.random.default_rng(17)
    for _ in range(20):
        p = _random_point(rng, 3)
        lf = leaf_through(p)
        if lf.dim != 2:
            continue
        m = poisson_matrix(p)
        d = lf.directions
        assert d[:, 0] @ (m @ d[:, 1]) >= 0.0


def test_same_leaf_detects_leaving():
    rng = np.random.default_rng(9)
    p = _random_point(rng, 3)
    lf = leaf_through(p)
    m = poisson_matrix(p)
    _, kernel = rank_and_kernel(m)
    # moving inside the plane keeps the leaf
    shifted = CovectorPoint(np.asarray(p.h, dtype=float) + 0.3 * lf.directions[:, 0],
                            p.h2)
    assert same_leaf(shifted, lf)
    # moving along the kernel changes a conserved linear integral
    off = CovectorPoint(np.asarray(p.h, dtype=float) + 1e-3 * kernel[:, 0], p.h2)
    assert not same_leaf(off, lf)
    # changing a frozen coordinate leaves the leaf too
    h2_new = np.asarray(p.h2, dtype=float).copy()
    h2_new[0] += 1e-3
    assert not same_leaf(CovectorPoint(p.h, h2_new), lf)


def test_linear_integral_exact_and_float():
    p = CovectorPoint([Fraction(1, 2), Fraction(3)], [Fraction(1)])
    a = np.array([Fraction(2), Fraction(-1, 3)], dtype=object)
    assert linear_integral(p, a) == Fraction(0)
    pf = CovectorPoint([0.5, 3.0], [1.0])
    assert linear_integral(pf, np.array([2.0, -1.0 / 3.0])) == pytest.approx(0.0)


def test_zero_matrix_leaf_is_a_point():
    p = CovectorPoint([1.0, -2.0], [0.0])
    lf = leaf_through(p)
    assert lf.dim == 0
    assert lf.kernel.shape == (2, 2)
    assert same_leaf(p, lf)
    q = CovectorPoint([1.0, -1.9], [0.0])
    assert not same_leaf(q, lf)
