"""Basis bookkeeping, brackets, and the left-invariant frame."""

import numpy as np
import pytest

from carnot.algebra import (
    MAX_GENERATORS,
    AlgebraShape,
    GroupPoint,
    bracket,
    bracket_vectors,
    model_field,
    pair_index,
    pair_unindex,
)


def test_dimensions():
    for k in range(2, MAX_GENERATORS + 1):
        shape = AlgebraShape(k)
        assert shape.dim_first == k
        assert shape.dim_second == k * (k - 1) // 2
        assert shape.dim_total == k * (k + 1) // 2


def test_generator_count_bounds():
    with pytest.raises(ValueError):
        AlgebraShape(1)
    with pytest.raises(ValueError):
        AlgebraShape(MAX_GENERATORS + 1)
    with pytest.raises(TypeError):
        AlgebraShape(3.0)


def test_pair_order_is_lexicographic():
    for k in range(2, 8):
        shape = AlgebraShape(k)
        pairs = list(shape.pairs())
        assert pairs == sorted(pairs)
        assert len(pairs) == shape.dim_second
        for offset, (i, j) in enumerate(pairs):
            assert pair_index(k, i, j) == offset
            assert pair_unindex(k, offset) == (i, j)


def test_pair_index_rejects_bad_pairs():
    with pytest.raises(ValueError):
        pair_index(4, 2, 2)
    with pytest.raises(ValueError):
        pair_index(4, 3, 2)
    with pytest.raises(ValueError):
        pair_index(4, 0, 1)
    with pytest.raises(ValueError):
        pair_unindex(4, 6)


def test_basis_brackets():
    shape = AlgebraShape(4)
    k = shape.k
    for i, j in shape.pairs():
        vec = bracket(shape, i, j)
        expected = np.zeros(shape.dim_total)
        expected[k + shape.pair_index(i, j)] = 1.0
        assert np.array_equal(vec, expected)
        assert np.array_equal(bracket(shape, j, i), -expected)
    # second layer is central
    assert not np.any(bracket(shape, (1, 2), 3))
    assert not np.any(bracket(shape, 3, (1, 2)))
    assert not np.any(bracket(shape, (1, 2), (3, 4)))
    assert not np.any(bracket(shape, 2, 2))


def test_bracket_vectors_bilinear_and_antisymmetric():
    rng = np.random.default_rng(11)
    shape = AlgebraShape(5)
    n = shape.dim_total
    for _ in range(25):
        a, b = rng.normal(size=(2, n))
        ab = bracket_vectors(shape, a, b)
        assert np.allclose(ab, -bracket_vectors(shape, b, a), atol=1e-13)
        # only second-layer output
        assert not np.any(ab[: shape.k])
        s, t = rng.normal(size=2)
        c = rng.normal(size=n)
        left = bracket_vectors(shape, s * a + t * c, b)
        assert np.allclose(left, s * ab + t * bracket_vectors(shape, c, b), atol=1e-12)


def test_jacobi_identity():
    rng = np.random.default_rng(7)
    for k in (2, 3, 5):
        shape = AlgebraShape(k)
        n = shape.dim_total
        for _ in range(10):
            a, b, c = rng.normal(size=(3, n))
            total = (
                bracket_vectors(shape, a, bracket_vectors(shape, b, c))
                + bracket_vectors(shape, b, bracket_vectors(shape, c, a))
                + bracket_vectors(shape, c, bracket_vectors(shape, a, b))
            )
            assert np.allclose(total, 0.0, atol=1e-12)


def test_nilpotency_step_two():
    # brackets of brackets vanish: the second layer is central
    shape = AlgebraShape(4)
    rng = np.random.default_rng(3)
    a, b, c = rng.normal(size=(3, shape.dim_total))
    inner = bracket_vectors(shape, a, b)
    assert np.allclose(bracket_vectors(shape, inner, c), 0.0)


def test_model_field_coefficients():
    shape = AlgebraShape(3)
    g = GroupPoint(np.array([2.0, -1.0, 4.0]), np.zeros(3))
    v1 = model_field(shape, 1, g)
    # 1 in slot 1, -x_2/2 at (1,2), -x_3/2 at (1,3)
    assert v1[0] == 1.0 and v1[1] == 0.0 and v1[2] == 0.0
    assert v1[3 + shape.pair_index(1, 2)] == 0.5
    assert v1[3 + shape.pair_index(1, 3)] == -2.0
    assert v1[3 + shape.pair_index(2, 3)] == 0.0
    v3 = model_field(shape, 3, g)
    assert v3[2] == 1.0
    assert v3[3 + shape.pair_index(1, 3)] == 1.0  # +x_1/2
    assert v3[3 + shape.pair_index(2, 3)] == -0.5  # +x_2/2


def test_model_field_commutator_matches_bracket():
    """The frame fields realize the algebra: the x2 part of the commutator
    of X_i and X_j at any point is the constant field of X_ij."""
    shape = AlgebraShape(4)
    rng = np.random.default_rng(19)
    eps = 1e-6
    for _ in range(5):
        x = rng.normal(size=4)
        g = GroupPoint(x, np.zeros(shape.dim_second))
        for i in range(1, 5):
            for j in range(i + 1, 5):
                # directional derivative of field j along field i minus the
                # reverse; fields depend on x only, so shift x along e_i
                def field_at(idx, xv):
                    return model_field(shape, idx, GroupPoint(xv, np.zeros(6)))

                di_of_j = (field_at(j, x + eps * np.eye(4)[i - 1])
                           - field_at(j, x - eps * np.eye(4)[i - 1])) / (2 * eps)
                dj_of_i = (field_at(i, x + eps * np.eye(4)[j - 1])
                           - field_at(i, x - eps * np.eye(4)[j - 1])) / (2 * eps)
                comm = di_of_j - dj_of_i
                expected = np.zeros(shape.dim_total)
                expected[4 + shape.pair_index(i, j)] = 1.0
                assert np.allclose(comm, expected, atol=1e-8)


def test_group_point_validation_and_immutability():
    p = GroupPoint.origin(3)
    assert p.shape.k == 3
    with pytest.raises(ValueError):
        p.x[0] = 1.0
    with pytest.raises(ValueError):
        GroupPoint(np.zeros(3), np.zeros(2))
    with pytest.raises(ValueError):
        GroupPoint(np.array([1.0, np.inf]), np.zeros(1))
