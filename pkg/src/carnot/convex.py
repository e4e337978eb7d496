"""Strictly convex control sets with closed-form support functions.

A body U (compact, strictly convex, origin in the interior) enters the
extremal flow only through its support function H(h) = max_{u in U} <u, h>
and the maximizer u(h) = grad H(h), which is the extremal control for the
covector direction h.  Three families are provided:

* Ellipsoid       {center + A^(1/2) v : |v| <= 1},   H = <c,h> + sqrt(h'Ah)
* LqBall          {center + d o v : ||v||_q <= 1},   H = <c,h> + ||d o h||_q'
* BallIntersection  intersection of round balls; the support point is found
  by exact case analysis over sphere-intersection strata.

Ellipsoids and lq balls have smooth boundaries, so their polar sets are
strictly convex and every leaf-restricted support function has a unique
minimizer.  Ball intersections are still strictly convex but carry corner
strata (ridges, vertices) whose normal cones are fat; these are the bodies
whose fixed-point sets on a leaf can be segments or planar regions.

Polytopes are rejected: with flat faces the maximizer is non-unique along
face normals and the extremal flow loses uniqueness.
"""

from __future__ import annotations

import numpy as np


class BodyError(ValueError):
    """Invalid convex body specification."""


class AbnormalPointError(ValueError):
    """An operation hit the abnormal locus h = 0 where the extremal control
    and the unit-level normalization are undefined."""


def _check_vector(v, k: int | None, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise BodyError(f"{name} must be a vector")
    if k is not None and arr.shape != (k,):
        raise BodyError(f"{name} must have length {k}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise BodyError(f"{name} must be finite")
    return arr


class ConvexBody:
    """Interface of a strictly convex control set.

    Subclasses implement support, grad_support and gauge in closed form.
    support and grad_support accept a single direction of shape (k,) or a
    batch of shape (..., k), acting along the last axis.  grad_support is
    undefined at h = 0 and raises there.  gauge is the Minkowski functional
    of the body translated so its center sits at the origin; membership of
    a point u reads gauge(u - center) <= 1.
    """

    kind = "abstract"

    def __init__(self, k: int):
        self.k = int(k)

    def support(self, h):
        raise NotImplementedError("generic bodies are an extension point; "
                                  "ship a closed-form support function")

    def grad_support(self, h):
        raise NotImplementedError

    def gauge(self, u):
        raise NotImplementedError

    @property
    def center(self) -> np.ndarray:
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError

    # -- shared validation -------------------------------------------------

    def _validate_origin_interior(self, seed: int = 0):
        """Sampling check that 0 lies strictly inside: H must be positive on
        the coordinate axes and on 64 pseudo-random directions.  Families
        with an exact criterion run it in addition (and first)."""
        k = self.k
        dirs = [np.eye(k)[i] * s for i in range(k) for s in (+1.0, -1.0)]
        rng = np.random.default_rng(seed)
        for _ in range(64):
            v = rng.standard_normal(k)
            n = np.linalg.norm(v)
            if n > 1e-12:
                dirs.append(v / n)
        for d in dirs:
            if self.support(d) <= 1e-12:
                raise BodyError(
                    "the origin is not strictly interior to the body "
                    f"(support {self.support(d):.3e} in direction {d})"
                )

    def _grad_batch_guard(self, h: np.ndarray):
        norms = np.linalg.norm(h, axis=-1)
        if np.any(norms == 0.0):
            raise AbnormalPointError("support gradient undefined at h = 0")


class Ellipsoid(ConvexBody):
    """Ellipsoid {center + A^(1/2) v : |v| <= 1} with A symmetric positive
    definite.  H(h) = <center, h> + sqrt(h' A h); the maximizer is
    center + A h / sqrt(h' A h)."""

    kind = "ellipsoid"

    def __init__(self, a, center=None, seed: int = 0):
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise BodyError("ellipsoid shape matrix must be square")
        k = a.shape[0]
        super().__init__(k)
        if not np.all(np.isfinite(a)):
            raise BodyError("ellipsoid shape matrix must be finite")
        if np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
            raise BodyError("ellipsoid shape matrix must be symmetric")
        a = 0.5 * (a + a.T)
        eigvals = np.linalg.eigvalsh(a)
        if eigvals[0] <= 1e-12 * max(1.0, eigvals[-1]):
            raise BodyError(
                "ellipsoid shape matrix must be positive definite "
                f"(smallest eigenvalue {eigvals[0]:.3e}); a degenerate matrix "
                "gives a flat, non-strictly-convex set"
            )
        self.a = a
        self._a_inv = np.linalg.inv(a)
        self._center = (
            np.zeros(k) if center is None else _check_vector(center, k, "center")
        )
        # exact interior criterion: c' A^-1 c < 1
        depth = float(self._center @ self._a_inv @ self._center)
        if depth >= 1.0 - 1e-12:
            raise BodyError(
                f"origin not strictly interior: center' A^-1 center = {depth:.6f} >= 1"
            )
        self._validate_origin_interior(seed)

    @property
    def center(self) -> np.ndarray:
        return self._center

    def support(self, h):
        h = np.asarray(h, dtype=float)
        quad = np.einsum("...i,ij,...j->...", h, self.a, h)
        return h @ self._center + np.sqrt(quad)

    def grad_support(self, h):
        h = np.asarray(h, dtype=float)
        self._grad_batch_guard(h)
        ah = h @ self.a
        quad = np.sqrt(np.einsum("...i,...i->...", h, ah))
        return self._center + ah / quad[..., None] if h.ndim > 1 else self._center + ah / quad

    def gauge(self, u):
        u = np.asarray(u, dtype=float)
        return np.sqrt(np.einsum("...i,ij,...j->...", u, self._a_inv, u))

    def to_spec(self) -> dict:
        return {"kind": self.kind, "a": self.a.tolist(), "center": self._center.tolist()}


class LqBall(ConvexBody):
    """Weighted lq ball {center + d o v : ||v||_q <= 1} for q in (1, inf),
    d positive weights.  With the dual exponent q' = q/(q-1),
    H(h) = <center, h> + ||d o h||_q'."""

    kind = "lq_ball"

    def __init__(self, q: float, d, center=None, seed: int = 0):
        q = float(q)
        if not np.isfinite(q) or q <= 1.0:
            raise BodyError(
                f"lq ball requires 1 < q < inf for strict convexity, got q={q}; "
                "q = 1 and q = inf are polytopal limits with non-unique maximizers"
            )
        d = _check_vector(d, None, "d")
        if np.any(d <= 0.0):
            raise BodyError("lq ball weights must be strictly positive")
        super().__init__(len(d))
        self.q = q
        self.q_dual = q / (q - 1.0)
        self.d = d
        self._center = (
            np.zeros(self.k) if center is None else _check_vector(center, self.k, "center")
        )
        # exact interior criterion: ||center / d||_q < 1
        depth = float(np.sum(np.abs(self._center / d) ** q) ** (1.0 / q))
        if depth >= 1.0 - 1e-12:
            raise BodyError(
                f"origin not strictly interior: ||center/d||_q = {depth:.6f} >= 1"
            )
        self._validate_origin_interior(seed)

    @property
    def center(self) -> np.ndarray:
        return self._center

    def support(self, h):
        h = np.asarray(h, dtype=float)
        w = np.abs(self.d * h)
        return h @ self._center + np.sum(w**self.q_dual, axis=-1) ** (1.0 / self.q_dual)

    def grad_support(self, h):
        h = np.asarray(h, dtype=float)
        self._grad_batch_guard(h)
        w = np.abs(self.d * h)
        norm = np.sum(w**self.q_dual, axis=-1) ** (1.0 / self.q_dual)
        scale = norm ** (self.q_dual - 1.0)
        num = self.d * np.sign(h) * w ** (self.q_dual - 1.0)
        if h.ndim > 1:
            return self._center + num / scale[..., None]
        return self._center + num / scale

    def gauge(self, u):
        u = np.asarray(u, dtype=float)
        return np.sum(np.abs(u / self.d) ** self.q, axis=-1) ** (1.0 / self.q)

    def to_spec(self) -> dict:
        return {
            "kind": self.kind,
            "q": self.q,
            "d": self.d.tolist(),
            "center": self._center.tolist(),
        }


class BallIntersection(ConvexBody):
    """Intersection of round balls B(c_j, r_j).

    Strictly convex (an intersection of strictly convex sets), but the
    boundary has corner strata where several spheres meet, so the support
    function is piecewise smooth.  The maximizer of <u, h> over the
    intersection lies on the sphere stratum of some active subset S: it is
    the support point of the (k - |S|)-sphere cut out by the spheres in S.
    All such candidates are closed-form; the feasible one with the largest
    value wins.  The gradient of H is the maximizer itself.
    """

    kind = "ball_intersection"

    def __init__(self, centers, radii, seed: int = 0):
        centers = np.asarray(centers, dtype=float)
        radii = np.asarray(radii, dtype=float)
        if centers.ndim != 2:
            raise BodyError("ball centers must form a 2-d array (m, k)")
        m, k = centers.shape
        if radii.shape != (m,):
            raise BodyError(f"need {m} radii, got shape {radii.shape}")
        if m < 1:
            raise BodyError("need at least one ball")
        if m > 4:
            raise BodyError("at most 4 balls are supported")
        if not (np.all(np.isfinite(centers)) and np.all(np.isfinite(radii))):
            raise BodyError("ball data must be finite")
        if np.any(radii <= 0.0):
            raise BodyError("ball radii must be positive")
        super().__init__(k)
        self.centers = centers
        self.radii = radii
        # exact interior criterion: every ball must contain the origin strictly
        margins = radii - np.linalg.norm(centers, axis=1)
        if np.any(margins <= 1e-12):
            j = int(np.argmin(margins))
            raise BodyError(
                f"origin not strictly interior: ball {j} has |c| - r margin "
                f"{margins[j]:.3e}"
            )
        self._subsets = self._enumerate_subsets(m, k)
        self._feas_tol = 1e-10 * float(np.max(radii))
        # the sphere stratum of a subset is direction-independent: solve each
        # geometry once here, support evaluations then reuse the frames
        self._strata = []
        for subset in self._subsets:
            stratum = self._stratum_sphere(subset)
            if stratum is None:
                continue
            others = np.array([j for j in range(m) if j not in subset], dtype=int)
            self._strata.append((subset, *stratum, others))
        self._validate_origin_interior(seed)

    @staticmethod
    def _enumerate_subsets(m: int, k: int):
        from itertools import combinations

        subsets = []
        for size in range(1, min(m, k) + 1):
            subsets.extend(combinations(range(m), size))
        return subsets

    @property
    def center(self) -> np.ndarray:
        # membership gauge is taken about the origin, which is validated interior
        return np.zeros(self.k)

    def _stratum_sphere(self, subset) -> tuple[np.ndarray, float, np.ndarray] | None:
        """Center, radius and tangential frame of the sphere stratum cut out
        by the balls in subset, or None when the stratum is empty.

        Subtracting the sphere equations pairwise against the first member
        leaves a linear system; the stratum is the slice of the first sphere
        by that affine subspace.
        """
        c0 = self.centers[subset[0]]
        r0 = self.radii[subset[0]]
        if len(subset) == 1:
            return c0, float(r0), np.eye(self.k)
        rows = []
        rhs = []
        for j in subset[1:]:
            cj = self.centers[j]
            rj = self.radii[j]
            rows.append(2.0 * (cj - c0))
            rhs.append(r0**2 - rj**2 - c0 @ c0 + cj @ cj)
        n_mat = np.asarray(rows)
        b = np.asarray(rhs)
        # point of the affine slice closest to c0, and the slice's tangent frame
        sol, residual, rank, sv = np.linalg.lstsq(n_mat, b - n_mat @ c0, rcond=None)
        if rank < n_mat.shape[0]:
            return None  # degenerate subset: parallel or repeated constraints
        if np.linalg.norm(n_mat @ sol - (b - n_mat @ c0)) > 1e-9 * (1.0 + np.linalg.norm(b)):
            return None
        z = c0 + sol
        rho_sq = r0**2 - sol @ sol
        if rho_sq <= 0.0:
            return None
        _, s, vt = np.linalg.svd(n_mat)
        frame = vt[n_mat.shape[0] :].T  # orthonormal basis of the tangent space
        return z, float(np.sqrt(rho_sq)), frame

    def _support_point(self, h: np.ndarray) -> tuple[float, np.ndarray]:
        best_val = -np.inf
        best_u = None
        for subset, z, rho, frame, others in self._strata:
            if frame.shape[1] > 0:
                w = frame.T @ h
                wn = np.linalg.norm(w)
                if wn > 1e-15:
                    u = z + rho * (frame @ (w / wn))
                else:
                    u = z + rho * frame[:, 0]
            else:
                u = z
            if len(others):
                gaps = np.linalg.norm(u - self.centers[others], axis=1)
                if np.any(gaps > self.radii[others] + self._feas_tol):
                    continue
            val = float(u @ h)
            if val > best_val:
                best_val = val
                best_u = u
        if best_u is None:
            raise BodyError("ball intersection is empty or degenerate")
        return best_val, best_u

    def support(self, h):
        h = np.asarray(h, dtype=float)
        if h.ndim == 1:
            return self._support_point(h)[0]
        flat = h.reshape(-1, self.k)
        out = np.array([self._support_point(row)[0] for row in flat])
        return out.reshape(h.shape[:-1])

    def grad_support(self, h):
        h = np.asarray(h, dtype=float)
        self._grad_batch_guard(h)
        if h.ndim == 1:
            return self._support_point(h)[1]
        flat = h.reshape(-1, self.k)
        out = np.array([self._support_point(row)[1] for row in flat])
        return out.reshape(h.shape)

    def gauge(self, u):
        """Minkowski functional about the origin: the largest of the single
        ball gauges, each solved from |u/t - c| = r."""
        u = np.asarray(u, dtype=float)
        vals = []
        for c, r in zip(self.centers, self.radii):
            uc = u @ c
            uu = np.einsum("...i,...i->...", u, u)
            denom = r**2 - c @ c
            vals.append((-uc + np.sqrt(uc**2 + denom * uu)) / denom)
        return np.max(np.stack(vals), axis=0)

    def to_spec(self) -> dict:
        return {
            "kind": self.kind,
            "balls": [
                {"center": c.tolist(), "radius": float(r)}
                for c, r in zip(self.centers, self.radii)
            ],
        }


def body_from_spec(spec: dict, k: int, seed: int = 0) -> ConvexBody:
    """Build a body from its JSON description, validating dimensions.

    Supported kinds: ellipsoid (fields a, center, both optional: identity
    matrix and origin by default), lq_ball (q required, d and center
    optional), ball_intersection (field balls: list of {center, radius}).
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise BodyError("body spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "polytope":
        raise BodyError(
            "polytope bodies are rejected: strict convexity is required, and a "
            "polytope's support maximizer is non-unique along its face normals, "
            "so the extremal flow loses uniqueness"
        )
    if kind == "ellipsoid":
        a = spec.get("a")
        a = np.eye(k) if a is None else np.asarray(a, dtype=float)
        if a.shape != (k, k):
            raise BodyError(f"ellipsoid matrix must be {k}x{k}, got {a.shape}")
        return Ellipsoid(a, spec.get("center"), seed=seed)
    if kind == "lq_ball":
        if "q" not in spec:
            raise BodyError("lq_ball requires an exponent q")
        d = spec.get("d")
        d = np.ones(k) if d is None else _check_vector(d, k, "d")
        return LqBall(spec["q"], d, spec.get("center"), seed=seed)
    if kind == "ball_intersection":
        balls = spec.get("balls")
        if not balls:
            raise BodyError("ball_intersection requires a non-empty 'balls' list")
        centers = [_check_vector(b.get("center"), k, "ball center") for b in balls]
        radii = [float(b.get("radius", 0.0)) for b in balls]
        return BallIntersection(np.asarray(centers), np.asarray(radii), seed=seed)
    raise BodyError(
        f"unknown body kind {kind!r}; supported kinds: ellipsoid, lq_ball, "
        f"ball_intersection"
    )


def unit_level_normalize(body: ConvexBody, p):
    """Rescale the first layer of p so that H(h) = 1.

    The support function is positively homogeneous, so p and the rescaled
    point generate the same extremal curve up to time parametrization; the
    unit level is the standard normalization for time-optimal extremals.
    Raises AbnormalPointError at h = 0, where no normalization exists.
    """
    from .coadjoint import CovectorPoint

    pf = p.as_float()
    hf = np.asarray(pf.h, dtype=float)
    if np.linalg.norm(hf) == 0.0:
        raise AbnormalPointError(
            "cannot normalize the abnormal point h = 0 onto the unit level"
        )
    value = float(body.support(hf))
    if value <= 0.0:
        raise AbnormalPointError(f"support value {value:.3e} is not positive")
    return CovectorPoint(hf / value, np.asarray(pf.h2, dtype=float))
