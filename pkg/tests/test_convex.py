"""Support functions, gradients, and gauges of the control-set families."""

import numpy as np
import pytest

from carnot.convex import (
    AbnormalPointError,
    BallIntersection,
    BodyError,
    Ellipsoid,
    LqBall,
    body_from_spec,
    unit_level_normalize,
)
from carnot.coadjoint import CovectorPoint


def _fd_gradient(body, h, eps=1e-6):
    g = np.zeros_like(h)
    for i in range(len(h)):
        step = np.zeros_like(h)
        step[i] = eps * max(1.0, abs(h[i]))
        g[i] = (body.support(h + step) - body.support(h - step)) / (2 * step[i])
    return g


def _random_bodies(rng, k):
    w = rng.normal(size=(k, k))
    spd = w @ w.T + k * np.eye(k)
    center = rng.normal(size=k) * 0.05
    yield Ellipsoid(spd, center)
    yield LqBall(float(rng.uniform(1.4, 4.0)), rng.uniform(0.5, 2.0, size=k),
                 center)


def test_euclidean_ball_support_closed_form():
    ball = Ellipsoid(np.eye(2))
    assert ball.support(np.array([3.0, 4.0])) == pytest.approx(5.0)
    assert ball.gauge(np.array([0.0, 0.25])) == pytest.approx(0.25)
    g = ball.grad_support(np.array([3.0, 4.0]))
    assert np.allclose(g, [0.6, 0.8])


def test_support_gradient_matches_finite_differences():
    rng = np.random.default_rng(100)
    for k in (2, 3, 5):
        for body in _random_bodies(rng, k):
            for _ in range(40):
                h = rng.normal(size=k)
                h = h / np.linalg.norm(h)
                g = body.grad_support(h)
                fd = _fd_gradient(body, h)
                assert np.allclose(g, fd, rtol=2e-6, atol=2e-6)


def test_euler_identity_and_maximizer_membership():
    rng = np.random.default_rng(7)
    for k in (2, 4):
        for body in _random_bodies(rng, k):
            hs = rng.normal(size=(200, k))
            vals = body.support(hs)
            grads = body.grad_support(hs)
            # homogeneity in integrated form: <grad H, h> = H
            euler = np.einsum("ij,ij->i", grads, hs)
            assert np.allclose(euler, vals, rtol=1e-12, atol=1e-10)
            # the gradient is the maximizer, a boundary point of the body
            gauge = body.gauge(grads - body.center)
            assert np.allclose(gauge, 1.0, atol=1e-10)


def test_support_is_positively_homogeneous_and_subadditive():
    rng = np.random.default_rng(13)
    body = LqBall(2.5, np.array([1.0, 0.7, 1.3]))
    for _ in range(50):
        h1, h2 = rng.normal(size=(2, 3))
        lam = float(rng.uniform(0.1, 5.0))
        assert body.support(lam * h1) == pytest.approx(lam * body.support(h1))
        assert body.support(h1 + h2) <= body.support(h1) + body.support(h2) + 1e-12


def test_batched_and_single_evaluations_agree():
    rng = np.random.default_rng(3)
    for body in _random_bodies(rng, 3):
        hs = rng.normal(size=(17, 3))
        batch_vals = body.support(hs)
        batch_grads = body.grad_support(hs)
        for row in range(17):
            assert batch_vals[row] == pytest.approx(body.support(hs[row]), abs=1e-14)
            assert np.allclose(batch_grads[row], body.grad_support(hs[row]))


def test_gradient_undefined_at_zero():
    body = Ellipsoid(np.eye(3))
    with pytest.raises(AbnormalPointError):
        body.grad_support(np.zeros(3))
    with pytest.raises(AbnormalPointError):
        body.grad_support(np.vstack([np.ones(3), np.zeros(3)]))


def test_ellipsoid_validation():
    with pytest.raises(BodyError):
        Ellipsoid(np.array([[1.0, 2.0], [0.0, 1.0]]))  # not symmetric
    with pytest.raises(BodyError):
        Ellipsoid(np.array([[1.0, 0.0], [0.0, -2.0]]))  # not positive definite
    with pytest.raises(BodyError):
        Ellipsoid(np.eye(2), center=[2.0, 0.0])  # origin outside


def test_lq_ball_validation():
    with pytest.raises(BodyError, match="polytop"):
        LqBall(1.0, np.ones(2))
    with pytest.raises(BodyError):
        LqBall(np.inf, np.ones(2))
    with pytest.raises(BodyError):
        LqBall(2.0, np.array([1.0, 0.0]))
    with pytest.raises(BodyError):
        LqBall(2.0, np.ones(2), center=[1.5, 0.0])


def test_lq_duality_against_direct_maximization():
    # H of the lq ball is the dual-exponent norm; cross-check by maximizing
    # <u, h> over boundary samples of the body
    rng = np.random.default_rng(77)
    q = 3.0
    d = np.array([1.0, 0.6])
    body = LqBall(q, d)
    thetas = np.linspace(0.0, 2 * np.pi, 200001)
    circle = np.column_stack([np.cos(thetas), np.sin(thetas)])
    boundary = circle / body.gauge(circle)[:, None]
    for _ in range(20):
        h = rng.normal(size=2)
        sampled = float(np.max(boundary @ h))
        assert body.support(h) == pytest.approx(sampled, rel=1e-7, abs=1e-7)


def test_ball_intersection_lens_geometry():
    c = np.array([0.3, 0.1, 0.0])
    lens = BallIntersection(np.vstack([c, -c]), np.array([1.0, 1.0]))
    # the ridge point in the plane of symmetry: both spheres active
    u0 = np.array([-0.3, 0.9, 0.0])
    n1 = u0 - c
    n2 = u0 + c
    for w1, w2 in ((1.0, 1.0), (2.0, 0.5), (0.2, 1.7)):
        direction = w1 * n1 + w2 * n2
        point = lens.grad_support(direction)
        assert np.allclose(point, u0, atol=1e-12)
        assert lens.support(direction) == pytest.approx(direction @ u0)
    # away from the ridge cone the maximizer sits on a single sphere: for
    # h = e1 the sphere-1 candidate c + e1 violates the other ball, so the
    # optimum is -c + e1 on sphere 2
    h = np.array([1.0, 0.0, 0.0])
    point = lens.grad_support(h)
    assert np.allclose(point, [0.7, -0.1, 0.0], atol=1e-12)
    assert lens.gauge(point) == pytest.approx(1.0, abs=1e-12)
    # the smooth part obeys finite differences too
    fd = _fd_gradient(lens, h)
    assert np.allclose(point, fd, atol=1e-6)


def test_ball_intersection_validation():
    with pytest.raises(BodyError):
        BallIntersection(np.zeros((5, 2)), np.ones(5))  # too many balls
    with pytest.raises(BodyError):
        BallIntersection(np.array([[2.0, 0.0]]), np.array([1.0]))  # origin outside
    with pytest.raises(BodyError):
        BallIntersection(np.array([[0.0, 0.0]]), np.array([-1.0]))


def test_body_from_spec_round_trip():
    for spec, k in (
        ({"kind": "ellipsoid", "a": [[2.0, 0.0], [0.0, 1.0]], "center": [0.1, 0.0]}, 2),
        ({"kind": "lq_ball", "q": 3.0, "d": [1.0, 0.5, 1.0]}, 3),
        ({"kind": "ball_intersection",
          "balls": [{"center": [0.2, 0.0], "radius": 1.0},
                    {"center": [-0.2, 0.0], "radius": 1.0}]}, 2),
    ):
        body = body_from_spec(spec, k)
        again = body_from_spec(body.to_spec(), k)
        h = np.array([0.3, -0.8, 0.5][:k])
        assert again.support(h) == pytest.approx(body.support(h), abs=1e-15)


def test_body_from_spec_rejections():
    with pytest.raises(BodyError, match="strict convexity"):
        body_from_spec({"kind": "polytope"}, 2)
    with pytest.raises(BodyError, match="kind"):
        body_from_spec({"kind": "banana"}, 2)
    with pytest.raises(BodyError):
        body_from_spec({"kind": "ellipsoid", "a": [[1.0]]}, 2)
    with pytest.raises(BodyError):
        body_from_spec("not a dict", 2)


def test_unit_level_normalization():
    body = Ellipsoid(np.diag([4.0, 1.0]))
    p = CovectorPoint([3.0, -1.0], [2.0])
    q = unit_level_normalize(body, p)
    assert body.support(np.asarray(q.h)) == pytest.approx(1.0, abs=1e-14)
    assert np.array_equal(q.h2, np.array([2.0]))
    with pytest.raises(AbnormalPointError):
        unit_level_normalize(body, CovectorPoint([0.0, 0.0], [1.0]))
