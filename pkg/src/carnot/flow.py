"""The vertical subsystem of the time-optimal extremal equations.

On the unit level {H = 1} of the support function the extremal covector
obeys

    dh/dt = -M(p) grad H(h),      dh_ij/dt = 0,

with M(p) the skew matrix of frozen second-layer coordinates.  The motion
stays on the coadjoint orbit through the initial point, conserves H, every
h_ij, the linear integrals <a, h> for a in ker M, and (odd k) the
polynomial Casimir.  On two-dimensional orbits every solution is a fixed
point or a periodic closed convex curve; this module integrates the system,
classifies initial data, detects periods, scans leaves for the fixed-point
set, and reconstructs the horizontal (group) motion driven by the extremal
control u(t) = grad H(h(t)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .algebra import AlgebraShape
from .casimir import pfaffian_coefficients
from .coadjoint import CovectorPoint, Leaf, leaf_through, poisson_matrix, rank_and_kernel
from .convex import AbnormalPointError, ConvexBody
from .dopri import DenseSolution, StepSizeUnderflow, integrate_ode


class IntegrationError(RuntimeError):
    """Vertical integration failed; carries the last accepted state."""

    def __init__(self, message: str, t_last: float, h_last: np.ndarray):
        super().__init__(message)
        self.t_last = t_last
        self.h_last = h_last


class PeriodDetectionError(RuntimeError):
    """Period detection could not complete on this orbit."""


@dataclass(frozen=True)
class FlowTolerances:
    """Knobs of the flow layer.

    step_tol      local error tolerance of the integrator (mixed abs/rel)
    fixed_point   fixed-point residual threshold, scaled by (1 + |M|)
    period        relative tolerance of the period refinement
    closure       relative closure tolerance |p(T) - p0| <= closure * |p0|
    rank          relative rank cutoff for the Poisson matrix
    """

    step_tol: float = 1e-10
    fixed_point: float = 1e-10
    period: float = 1e-9
    closure: float = 1e-7
    rank: float = 1e-9


def vertical_rhs(p: CovectorPoint, body: ConvexBody) -> np.ndarray:
    """Right-hand side -M(p) grad H(h(p)) of the vertical subsystem."""
    pf = p.as_float()
    if np.linalg.norm(pf.h) == 0.0:
        raise AbnormalPointError("vertical field undefined on the abnormal locus h = 0")
    m = poisson_matrix(pf)
    return -(m @ body.grad_support(pf.h))


@dataclass
class Trajectory:
    """A sampled solution of the vertical subsystem.

    hs holds the first-layer samples row per time; h2 is the common frozen
    second layer; controls the extremal control grad H per sample.  drift
    records the maximum absolute deviation of every conserved quantity over
    the samples ("h2" is exactly zero by construction: the second layer is
    never stepped).
    """

    times: np.ndarray
    hs: np.ndarray
    h2: np.ndarray
    controls: np.ndarray
    drift: dict
    leaf: Leaf
    body: ConvexBody
    dense: DenseSolution = field(repr=False)

    @property
    def k(self) -> int:
        return self.hs.shape[1]

    def point(self, i: int) -> CovectorPoint:
        return CovectorPoint(self.hs[i], self.h2)

    @property
    def points(self) -> list[CovectorPoint]:
        return [self.point(i) for i in range(len(self.times))]

    def state(self, t: float) -> np.ndarray:
        """First-layer state at any time inside the integrated range."""
        return self.dense(t)

    def min_return_distance(self, t_min: float = 1.0) -> tuple[float, float]:
        """Smallest sampled distance back to the initial point for t >= t_min
        and the time achieving it."""
        mask = self.times >= t_min
        if not np.any(mask):
            return float("inf"), float("nan")
        d = np.linalg.norm(self.hs[mask] - self.hs[0], axis=1)
        i = int(np.argmin(d))
        return float(d[i]), float(self.times[mask][i])


def _level_projector(body: ConvexBody, h_target: float, kernel: np.ndarray):
    """Newton projection onto the level set {H = h_target}.

    The correction is taken orthogonal to ker M so the projection cannot
    disturb the linear integrals (which the raw flow preserves to rounding
    on its own).  Used as the integrator's per-step postprocess hook; the
    linear invariants plus this projection keep every conserved quantity
    from accumulating truncation drift.
    """
    k_basis = kernel if kernel.size else None

    def project(t: float, h: np.ndarray) -> np.ndarray:
        for _ in range(3):
            gap = float(body.support(h)) - h_target
            if abs(gap) <= 1e-15 * max(1.0, abs(h_target)):
                break
            g = body.grad_support(h)
            if k_basis is not None:
                g = g - k_basis @ (k_basis.T @ g)
            gg = float(g @ g)
            if gg <= 1e-30:
                break
            h = h - (gap / gg) * g
        return h

    return project


def _drift_record(hs: np.ndarray, h2: np.ndarray, body: ConvexBody,
                  kernel: np.ndarray) -> dict:
    h0 = hs[0]
    drift: dict = {}
    hvals = body.support(hs)
    drift["H"] = float(np.max(np.abs(hvals - hvals[0])))
    drift["h2"] = 0.0
    ia = []
    for a in kernel.T:
        vals = (hs - h0) @ a
        ia.append(float(np.max(np.abs(vals))))
    drift["I_a"] = ia
    k = hs.shape[1]
    if k % 2 == 1:
        a_vec = pfaffian_coefficients(CovectorPoint(h0, h2))
        vals = (hs - h0) @ a_vec
        drift["C"] = float(np.max(np.abs(vals)))
    return drift


def integrate(p0: CovectorPoint, body: ConvexBody, horizon: float,
              step_tol: float = 1e-10, n_samples: int = 401,
              sample_times: np.ndarray | None = None) -> Trajectory:
    """Integrate the vertical subsystem over [0, horizon].

    Samples are taken from the dense output at sample_times (default: an
    even grid of n_samples points).  The second layer is constant by
    construction and is never stepped.  Raises IntegrationError with the
    last accepted state if the step size underflows (the right-hand side is
    singular on the abnormal locus h = 0, which trajectories can approach
    when the leaf passes near it).
    """
    pf = p0.as_float()
    h0 = np.asarray(pf.h, dtype=float)
    if np.linalg.norm(h0) == 0.0:
        raise AbnormalPointError("cannot integrate from the abnormal locus h = 0")
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    m = poisson_matrix(pf)
    lf = leaf_through(pf)
    project = _level_projector(body, float(body.support(h0)), lf.kernel)

    def rhs(t, h):
        return -(m @ body.grad_support(h))

    try:
        dense = integrate_ode(rhs, 0.0, h0, horizon, rtol=step_tol, atol=step_tol,
                              postprocess=project)
    except StepSizeUnderflow as exc:
        raise IntegrationError(
            f"vertical integration stalled at t={exc.t:.6g} "
            f"(step underflow near the abnormal locus or a rough control)",
            exc.t, exc.y,
        ) from exc

    if sample_times is None:
        sample_times = np.linspace(0.0, horizon, n_samples)
    else:
        sample_times = np.asarray(sample_times, dtype=float)
    hs = dense(sample_times) if len(sample_times) else np.empty((0, len(h0)))
    hs = np.atleast_2d(hs)
    if hs.size:
        # the interpolant between accepted steps is one order less accurate
        # than the propagated states, so samples get the same level-set
        # correction; linear integrals are exact at interpolated points
        # already and the kernel-orthogonal correction keeps them so
        hs = np.vstack([project(t, row) for t, row in zip(sample_times, hs)])
    controls = body.grad_support(hs)
    drift = _drift_record(hs, pf.h2, body, lf.kernel)
    return Trajectory(times=sample_times, hs=hs, h2=np.asarray(pf.h2, dtype=float),
                      controls=controls, drift=drift, leaf=lf, body=body, dense=dense)


@dataclass(frozen=True)
class Classification:
    """Outcome of the orbit trichotomy.

    kind is "constant", "periodic", or "unresolved_high_dim"; period is set
    for periodic orbits; fixed_point_residual is |M grad H(p0)|; orbit_dim
    is the rank of M(p0), the dimension of the coadjoint orbit.
    """

    kind: str
    period: float | None
    fixed_point_residual: float
    orbit_dim: int


def classify(p0: CovectorPoint, body: ConvexBody,
             tols: FlowTolerances = FlowTolerances()) -> Classification:
    """Classify the vertical motion from p0 (normalized to H = 1).

    Rank 0 orbits are points.  On two-dimensional orbits the motion is a
    fixed point precisely when grad H(p0) lies in ker M, detected through
    the residual |M grad H| <= fixed_point_tol * (1 + |M|); otherwise the
    orbit is a closed curve and the period is measured.  Orbits of
    dimension four and higher are reported unresolved: the dichotomy holds
    only on two-dimensional leaves, and quasi-periodic motion appears.
    """
    pf = p0.as_float()
    hval = float(body.support(pf.h)) if np.linalg.norm(pf.h) > 0 else 0.0
    if abs(hval - 1.0) > 1e-6:
        raise ValueError(
            f"classify expects a point on the unit level H = 1, got H = {hval:.9g}; "
            f"apply the unit-level normalization first"
        )
    m = poisson_matrix(pf)
    rank, _ = rank_and_kernel(m, tols.rank)
    if rank == 0:
        return Classification("constant", None, 0.0, 0)
    u = body.grad_support(pf.h)
    residual = float(np.linalg.norm(m @ u))
    if rank == 2:
        threshold = tols.fixed_point * (1.0 + np.linalg.norm(m, 2))
        if residual <= threshold:
            return Classification("constant", None, residual, 2)
        period = detect_period(p0, body, tols)
        return Classification("periodic", period, residual, 2)
    return Classification("unresolved_high_dim", None, residual, rank)


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def detect_period(p0: CovectorPoint, body: ConvexBody,
                  tols: FlowTolerances = FlowTolerances()) -> float:
    """Period of a closed orbit on a two-dimensional leaf.

    The orbit is parametrized in the orthonormal leaf frame.  The winding
    angle about the centroid of a coarse orbit sample must advance
    monotonically (the curve is strictly convex and the centroid interior);
    the first time the winding gains 2 pi brackets the period, which a
    safeguarded secant iteration then refines to relative tolerance
    tols.period.  The closure |p(T) - p0| <= tols.closure * |p0| is
    verified.
    """
    pf = p0.as_float()
    lf = leaf_through(pf, tols.rank)
    if lf.dim != 2:
        raise PeriodDetectionError(
            f"period detection needs a 2-dimensional leaf, got dimension {lf.dim}"
        )
    m = poisson_matrix(pf)
    h0 = np.asarray(pf.h, dtype=float)
    speed0 = float(np.linalg.norm(m @ body.grad_support(h0)))
    if speed0 <= tols.fixed_point * (1.0 + np.linalg.norm(m, 2)):
        raise PeriodDetectionError(
            "initial point is a fixed point within tolerance; no period exists"
        )

    def rhs(t, h):
        return -(m @ body.grad_support(h))

    project = _level_projector(body, float(body.support(h0)), lf.kernel)
    horizon = 2.0 * math.pi * max(np.linalg.norm(h0), 0.5) / speed0
    n_samples = 4096
    dense = None
    phis = None
    ts = None
    for _ in range(20):
        try:
            dense = integrate_ode(rhs, 0.0, h0, horizon,
                                  rtol=tols.step_tol, atol=tols.step_tol,
                                  postprocess=project)
        except StepSizeUnderflow as exc:
            raise PeriodDetectionError(
                f"integration stalled at t={exc.t:.6g} while hunting for the period"
            ) from exc
        ts = np.linspace(0.0, horizon, n_samples)
        ys = lf.plane_coords(dense(ts))
        centroid = ys.mean(axis=0)
        rel = ys - centroid
        radii = np.linalg.norm(rel, axis=1)
        if np.min(radii) < 1e-13 * max(1.0, np.max(radii)):
            raise PeriodDetectionError("orbit sample collapses onto its centroid")
        phis = np.unwrap(np.arctan2(rel[:, 1], rel[:, 0]))
        if abs(phis[-1] - phis[0]) >= 2.0 * math.pi * 1.05:
            break
        horizon *= 2.0
    else:
        raise PeriodDetectionError(
            "winding failed to advance by a full turn within the horizon budget; "
            "the initial data may be near a fixed point"
        )

    dphi = np.diff(phis)
    sign = 1.0 if phis[-1] > phis[0] else -1.0
    if np.any(sign * dphi <= 0.0):
        raise PeriodDetectionError(
            "winding angle is not monotone about the orbit centroid; the initial "
            "data may be near a fixed point or the sampling too coarse"
        )

    target = phis[0] + sign * 2.0 * math.pi
    idx = int(np.argmax(sign * (phis - target) >= 0.0))
    t_lo, t_hi = float(ts[idx - 1]), float(ts[idx])
    phi_lo = float(phis[idx - 1])
    y_lo = lf.plane_coords(dense(np.array([t_lo])))[0]
    ang_lo = math.atan2(y_lo[1] - centroid[1], y_lo[0] - centroid[0])

    def gap(t: float) -> float:
        y = lf.plane_coords(dense(np.array([t])))[0]
        ang = math.atan2(y[1] - centroid[1], y[0] - centroid[0])
        return phi_lo + _wrap_angle(ang - ang_lo) - target

    g_lo = gap(t_lo)
    g_hi = gap(t_hi)
    if g_lo * g_hi > 0.0:
        raise PeriodDetectionError("failed to bracket the full-turn crossing")
    a_t, b_t, g_a, g_b = t_lo, t_hi, g_lo, g_hi
    t_prev, g_prev = a_t, g_a
    t_cur, g_cur = b_t, g_b
    period = t_cur
    for _ in range(80):
        denom = g_cur - g_prev
        if denom != 0.0:
            t_next = t_cur - g_cur * (t_cur - t_prev) / denom
        else:
            t_next = 0.5 * (a_t + b_t)
        if not (a_t < t_next < b_t):
            t_next = 0.5 * (a_t + b_t)
        g_next = gap(t_next)
        if g_next == 0.0:
            period = t_next
            break
        if g_a * g_next < 0.0:
            b_t, g_b = t_next, g_next
        else:
            a_t, g_a = t_next, g_next
        t_prev, g_prev = t_cur, g_cur
        t_cur, g_cur = t_next, g_next
        period = t_next
        if b_t - a_t <= tols.period * max(abs(t_next), 1e-12):
            break

    h_period = dense(period)
    closure = float(np.linalg.norm(h_period - h0))
    scale = float(np.sqrt(np.linalg.norm(h0) ** 2 + np.linalg.norm(pf.h2) ** 2))
    if closure > tols.closure * max(scale, 1e-12):
        raise PeriodDetectionError(
            f"orbit failed the closure check: |p(T) - p0| = {closure:.3e} "
            f"exceeds {tols.closure:.1e} * |p0| = {tols.closure * scale:.3e}"
        )
    return float(period)


@dataclass(frozen=True)
class FixedSetEstimate:
    """Grid scan of the fixed-point set of a two-dimensional leaf.

    points_y are the in-leaf coordinates of the marked grid points (the
    candidates where grad H lies in ker M within mark_tol, plus the exact
    abnormal point h = 0 when the leaf contains it inside the scan window).
    The dimension estimate compares the principal extents of the marked set
    against thickness_tol, a small multiple of the grid spacing.
    """

    points_y: np.ndarray
    hull_y: np.ndarray
    dim_estimate: int | None
    extents: tuple[float, float]
    spacing: float
    thickness_tol: float
    mark_tol: float
    insufficient: bool
    origin_y: np.ndarray | None


def fixed_set_estimate(lf: Leaf, body: ConvexBody, grid_n: int = 61,
                       radius: float = 2.0, mark_tol: float = 1e-8,
                       h_floor: float = 1e-6) -> FixedSetEstimate:
    """Scan a two-dimensional leaf for the fixed-point set.

    Marks grid points where the in-plane projection of M grad H has norm at
    most mark_tol * (1 + |M|).  Points with H below h_floor sit on the
    abnormal locus where the control is undefined and are excluded from the
    residual scan; the locus itself reduces to the single point h = 0,
    which is added exactly when the leaf contains it within the window (it
    is the degenerate minimizer around which the curves of a centered
    problem wind).
    """
    if lf.dim != 2:
        raise ValueError(f"fixed-set scan needs a 2-dimensional leaf, got {lf.dim}")
    if grid_n < 2:
        raise ValueError("grid resolution must be at least 2")
    m = poisson_matrix(lf.base)
    d_frame = lf.directions
    axis = np.linspace(-radius, radius, grid_n)
    gy1, gy2 = np.meshgrid(axis, axis, indexing="ij")
    ys = np.column_stack([gy1.ravel(), gy2.ravel()])
    hs = lf.point_at(ys)
    hvals = body.support(hs)
    ok = hvals >= h_floor
    marked: list[np.ndarray] = []
    threshold = mark_tol * (1.0 + np.linalg.norm(m, 2))
    if np.any(ok):
        us = body.grad_support(hs[ok])
        proj = (us @ (-m.T)) @ d_frame  # in-plane components of M grad H
        res = np.linalg.norm(proj, axis=1)
        marked.extend(ys[ok][res <= threshold])

    base_h = np.asarray(lf.base.h, dtype=float)
    origin_y = None
    out_of_plane = base_h - d_frame @ (d_frame.T @ base_h)
    if np.linalg.norm(out_of_plane) <= 1e-9 * (1.0 + np.linalg.norm(base_h)):
        y0 = -(d_frame.T @ base_h)
        if np.max(np.abs(y0)) <= radius:
            origin_y = y0
            marked.append(y0)

    spacing = 2.0 * radius / (grid_n - 1)
    thickness_tol = 1.75 * spacing
    if not marked:
        return FixedSetEstimate(
            points_y=np.empty((0, 2)), hull_y=np.empty((0, 2)), dim_estimate=None,
            extents=(0.0, 0.0), spacing=spacing, thickness_tol=thickness_tol,
            mark_tol=threshold, insufficient=True, origin_y=None,
        )
    pts = np.vstack(marked)
    center = pts.mean(axis=0)
    rel = pts - center
    if len(pts) == 1:
        extents = (0.0, 0.0)
    else:
        _, _, vt = np.linalg.svd(rel, full_matrices=False)
        proj = rel @ vt.T
        spans = proj.max(axis=0) - proj.min(axis=0)
        extents = (float(spans[0]), float(spans[1]) if proj.shape[1] > 1 else 0.0)
    dim_est = int(np.sum(np.asarray(extents) > thickness_tol))
    hull = _hull_vertices(pts)
    return FixedSetEstimate(
        points_y=pts, hull_y=hull, dim_estimate=dim_est, extents=extents,
        spacing=spacing, thickness_tol=thickness_tol, mark_tol=threshold,
        insufficient=False, origin_y=origin_y,
    )


def _hull_vertices(pts: np.ndarray) -> np.ndarray:
    if len(pts) == 1:
        return pts.copy()
    try:
        from scipy.spatial import ConvexHull, QhullError

        hull = ConvexHull(pts)
        return pts[hull.vertices]
    except (QhullError, ValueError):
        # collinear or duplicate points: fall back to the extreme pair
        center = pts.mean(axis=0)
        rel = pts - center
        _, _, vt = np.linalg.svd(rel, full_matrices=False)
        coords = rel @ vt[0]
        return pts[[int(np.argmin(coords)), int(np.argmax(coords))]]


def subriemannian_closed_form(p0: CovectorPoint, t: float,
                              rate: float = 1.0) -> np.ndarray:
    """First layer of the vertical flow for the centered unit ball.

    On the unit level the extremal control is h itself and the subsystem is
    linear: h(t) = exp(-rate * t * M) h(0).  rate = 1 matches the
    unit-level support-function convention used by the integrator; the
    variant with H = |h|^2 and no normalization doubles the angular speeds,
    which is rate = 2.
    """
    pf = p0.as_float()
    m = poisson_matrix(pf)
    return scipy.linalg.expm(-rate * float(t) * m) @ np.asarray(pf.h, dtype=float)


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenfrequencies of the linear (unit ball) vertical flow.

    frequencies holds the positive imaginary parts of the eigenvalues of M
    in decreasing order; zero_multiplicity the dimension of ker M.  When
    the frequencies admit integers m_j <= max_denominator with m_j alpha_j
    all equal (within tol * alpha_1), the flow is periodic with
    common_period = 2 pi lcm(m_j) / (m_1 alpha_1).
    """

    frequencies: np.ndarray
    commensurable: bool
    common_period: float | None
    zero_multiplicity: int
    integer_vector: tuple[int, ...] | None


def spectrum(m: np.ndarray, tol: float = 1e-9,
             max_denominator: int = 64) -> SpectrumReport:
    """Frequency analysis of a skew matrix through its imaginary spectrum."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    k = m.shape[0]
    w = np.linalg.eigvalsh(1j * m)
    wmax = float(np.max(np.abs(w))) if k else 0.0
    if wmax == 0.0:
        return SpectrumReport(np.empty(0), True, None, k, None)
    pos = np.sort(w[w > tol * wmax])[::-1].copy()
    zero_mult = k - 2 * len(pos)
    if len(pos) == 0:
        return SpectrumReport(pos, True, None, k, None)
    alpha1 = float(pos[0])
    denominators = []
    numerators = []
    for alpha in pos:
        frac = Fraction(alpha1 / float(alpha)).limit_denominator(max_denominator)
        numerators.append(frac.numerator)
        denominators.append(frac.denominator)
    m1 = math.lcm(*denominators)
    ints: list[int] = []
    ok = m1 <= max_denominator
    if ok:
        for alpha, num, den in zip(pos, numerators, denominators):
            mj = num * (m1 // den)
            if mj > max_denominator or mj < 1:
                ok = False
                break
            if abs(mj * float(alpha) - m1 * alpha1) > tol * alpha1:
                ok = False
                break
            ints.append(mj)
    if not ok:
        return SpectrumReport(pos, False, None, zero_mult, None)
    omega = m1 * alpha1
    period = 2.0 * math.pi * math.lcm(*ints) / omega
    return SpectrumReport(pos, True, float(period), zero_mult, tuple(ints))


@dataclass(frozen=True)
class RecurrenceScan:
    """Non-return diagnostics of the linear flow over a long horizon.

    min_distance is the smallest |h(t) - h(0)| over sampled t >= t_min;
    the histogram counts visits of the leading two phase angles on a
    bins x bins grid over the 2-torus.
    """

    min_distance: float
    argmin_time: float
    t_min: float
    horizon: float
    dt: float
    occupied_bins: int
    total_bins: int
    min_bin_count: int
    histogram: np.ndarray = field(repr=False)


def recurrence_scan(p0: CovectorPoint, horizon: float, dt: float = 0.01,
                    t_min: float = 1.0, rate: float = 1.0,
                    bins: int = 32) -> RecurrenceScan:
    """Closed-form scan of the unit-ball flow for near-returns.

    Diagonalizing the skew matrix reduces the distance to the initial point
    to a sum of 4 |z_j|^2 sin^2(w_j t / 2) terms, evaluated on a dense time
    grid without stepping the ODE.  Requires at least two nonzero
    frequencies for the torus histogram; with fewer the histogram is empty
    and only the return distance is reported.
    """
    pf = p0.as_float()
    m = poisson_matrix(pf)
    h0 = np.asarray(pf.h, dtype=float)
    w, v = np.linalg.eigh(1j * m)
    z0 = v.conj().T @ h0.astype(complex)
    ts = np.arange(0.0, horizon + 0.5 * dt, dt)
    weights = 4.0 * np.abs(z0) ** 2
    sin_sq = np.sin(np.outer(ts, rate * w) / 2.0) ** 2
    dist = np.sqrt(np.maximum(sin_sq @ weights, 0.0))
    mask = ts >= t_min
    d_masked = dist[mask]
    i = int(np.argmin(d_masked))
    min_distance = float(d_masked[i])
    argmin_time = float(ts[mask][i])

    wmax = float(np.max(np.abs(w))) if len(w) else 0.0
    pos_idx = [j for j in range(len(w)) if w[j] > 1e-9 * max(wmax, 1.0)]
    pos_idx.sort(key=lambda j: -w[j])
    if len(pos_idx) >= 2:
        j1, j2 = pos_idx[0], pos_idx[1]
        th1 = (rate * w[j1] * ts + np.angle(z0[j1])) % (2.0 * math.pi)
        th2 = (rate * w[j2] * ts + np.angle(z0[j2])) % (2.0 * math.pi)
        hist, _, _ = np.histogram2d(
            th1, th2, bins=bins, range=[[0.0, 2.0 * math.pi], [0.0, 2.0 * math.pi]]
        )
        hist = hist.astype(int)
    else:
        hist = np.zeros((0, 0), dtype=int)
    occupied = int(np.count_nonzero(hist)) if hist.size else 0
    min_count = int(hist.min()) if hist.size else 0
    return RecurrenceScan(
        min_distance=min_distance, argmin_time=argmin_time, t_min=t_min,
        horizon=horizon, dt=dt, occupied_bins=occupied,
        total_bins=int(hist.size), min_bin_count=min_count, histogram=hist,
    )


@dataclass
class HorizontalCurve:
    """The group trajectory recovered from the extremal control.

    xs holds rows (x_1..x_k, x_12, ..., x_(k-1)k) per sample time; the
    first layer integrates the control directly, the second layer the
    signed-area densities (x_i u_j - x_j u_i) / 2.
    """

    times: np.ndarray
    xs: np.ndarray
    k: int

    def endpoint(self):
        from .algebra import GroupPoint

        return GroupPoint(self.xs[-1, : self.k], self.xs[-1, self.k :])


def reconstruct_horizontal(traj: Trajectory, step_tol: float = 1e-10) -> HorizontalCurve:
    """Integrate the horizontal system driven by the trajectory's control.

    dx_i = u_i dt and dx_ij = (x_i u_j - x_j u_i) / 2 dt from the identity,
    with u(t) read off the dense vertical solution.  The x_ij accumulate
    the signed areas swept by the projections of the first-layer path: for
    a closed planar loop x_12 at the period equals the enclosed area.
    """
    shape = AlgebraShape(traj.k)
    k = shape.k
    pairs = list(shape.pairs())
    body = traj.body
    dense_v = traj.dense

    def rhs(t, x):
        u = body.grad_support(dense_v(t))
        out = np.empty(shape.dim_total)
        out[:k] = u
        for off, (i, j) in enumerate(pairs):
            out[k + off] = 0.5 * (x[i - 1] * u[j - 1] - x[j - 1] * u[i - 1])
        return out

    horizon = float(traj.times[-1]) if len(traj.times) else 0.0
    try:
        dense_x = integrate_ode(rhs, 0.0, np.zeros(shape.dim_total), horizon,
                                rtol=step_tol, atol=step_tol)
    except StepSizeUnderflow as exc:
        raise IntegrationError(
            f"horizontal reconstruction stalled at t={exc.t:.6g}", exc.t, exc.y
        ) from exc
    xs = np.atleast_2d(dense_x(traj.times))
    return HorizontalCurve(times=traj.times.copy(), xs=xs, k=k)
