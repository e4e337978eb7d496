"""Embedded Runge-Kutta integrator of orders 5(4) with dense output.

Dormand-Prince coefficients (the classic RK5(4)7M pair): the fifth-order
solution is propagated, the fourth-order one serves the error estimate.
Step size follows a PI controller with Lund stabilization,

    factor = safety * err_n^(-(1/5 - 0.75 beta)) * err_(n-1)^beta,

clamped to [0.2, 10].  Dense output uses the quartic interpolant of
Shampine tuned for this pair (the same continuous extension most production
codes ship); its accuracy matches the propagated solution's local error, so
sampling between steps does not degrade conserved quantities.

The last stage is the first stage of the next step (FSAL), at 6 right-hand
side evaluations per accepted step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# fmt: off
C_NODES = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])

A_COEF = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]

B_HIGH = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])

# B_HIGH - B_LOW: dotting with the stages gives the embedded error estimate
E_DIFF = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200,
                   22 / 525, -1 / 40])

# quartic interpolant: y(t0 + s h) = y0 + h * (K^T P) @ (s, s^2, s^3, s^4)
P_DENSE = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])
# fmt: on

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
BETA = 0.04
EXPONENT = 1 / 5 - 0.75 * BETA


class StepSizeUnderflow(RuntimeError):
    """The controller drove the step below the resolution of the time axis,
    typically because the right-hand side is blowing up or is no longer
    Lipschitz along the path.  Carries the last accepted state."""

    def __init__(self, t: float, y: np.ndarray, message: str | None = None):
        super().__init__(
            message or f"step size underflow at t={t:.6g}; right-hand side is "
            "too rough to continue"
        )
        self.t = t
        self.y = y


@dataclass
class DenseSolution:
    """Piecewise-quartic continuous solution on [t0, t_end].

    Evaluation at arbitrary times inside the integration range; vectorized
    over a 1-d array of query times.
    """

    breakpoints: np.ndarray  # accepted step times, shape (n_steps + 1,)
    states: np.ndarray  # states at the breakpoints, shape (n_steps + 1, dim)
    coefs: np.ndarray  # per-step interpolant K^T P, shape (n_steps, dim, 4)
    steps: np.ndarray  # step lengths, shape (n_steps,)

    @property
    def t0(self) -> float:
        return float(self.breakpoints[0])

    @property
    def t_end(self) -> float:
        return float(self.breakpoints[-1])

    def __call__(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        lo, hi = self.t0, self.t_end
        pad = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(t_arr < lo - pad) or np.any(t_arr > hi + pad):
            raise ValueError(
                f"dense output queried outside [{lo:.6g}, {hi:.6g}]"
            )
        idx = np.clip(np.searchsorted(self.breakpoints, t_arr, side="right") - 1,
                      0, len(self.steps) - 1)
        s = (t_arr - self.breakpoints[idx]) / self.steps[idx]
        powers = np.stack([s, s**2, s**3, s**4], axis=-1)  # (m, 4)
        inc = np.einsum("mdp,mp->md", self.coefs[idx], powers)
        out = self.states[idx] + self.steps[idx][:, None] * inc
        return out[0] if np.isscalar(t) or np.ndim(t) == 0 else out


def _error_norm(err: np.ndarray, y0: np.ndarray, y1: np.ndarray,
                rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(f, t0: float, y0: np.ndarray, f0: np.ndarray,
                  rtol: float, atol: float, t_span: float) -> float:
    """Hairer-style two-evaluation guess of a safe first step."""
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_span)
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, t_span)


def integrate_ode(f, t0: float, y0, t_end: float, rtol: float, atol: float,
                  max_step: float = np.inf, first_step: float | None = None,
                  max_steps: int = 2_000_000,
                  postprocess=None) -> DenseSolution:
    """Integrate y' = f(t, y) from t0 to t_end (forward), returning the dense
    solution.  Raises StepSizeUnderflow with the last accepted state when the
    controller cannot proceed.

    postprocess, when given, is applied to every accepted state as
    y <- postprocess(t, y) before the state seeds the next step.  The hook is
    meant for manifold projection (pulling the state back onto a conserved
    level set); it must be a small correction, since the error estimate of
    the step does not see it.  Using it costs one extra f evaluation per
    accepted step because the first-same-as-last reuse needs the derivative
    at the corrected point.
    """
    y = np.asarray(y0, dtype=float).copy()
    if t_end < t0:
        raise ValueError("backward integration is not supported")
    dim = y.shape[0]
    k_stages = np.empty((7, dim))
    k_stages[0] = f(t0, y)

    span = t_end - t0
    if span == 0.0:
        return DenseSolution(
            breakpoints=np.array([t0, t0]),
            states=np.stack([y, y]),
            coefs=np.zeros((1, dim, 4)),
            steps=np.array([1.0]),
        )

    h = first_step if first_step is not None else _initial_step(
        f, t0, y, k_stages[0], rtol, atol, span)
    h = min(h, max_step, span)

    ts = [t0]
    ys = [y.copy()]
    coef_list = []
    step_list = []

    t = t0
    err_prev = 1e-4
    n_steps = 0
    while t < t_end:
        if n_steps >= max_steps:
            raise StepSizeUnderflow(
                t, y, f"step budget of {max_steps} exhausted at t={t:.6g}")
        h = min(h, t_end - t)
        h_floor = 1e-14 * max(abs(t), 1.0)
        if h < h_floor:
            raise StepSizeUnderflow(t, y)

        for s in range(1, 7):
            ys_stage = y + h * (A_COEF[s] @ k_stages[:s])
            k_stages[s] = f(t + C_NODES[s] * h, ys_stage)
        y_new = y + h * (B_HIGH @ k_stages)
        # FSAL: stage 7 was evaluated at (t + h, y_new) because A[6] == B
        err_vec = h * (E_DIFF @ k_stages)
        err = _error_norm(err_vec, y, y_new, rtol, atol)

        if err <= 1.0:
            coef_list.append(k_stages.T @ P_DENSE)
            step_list.append(h)
            t = t + h
            if postprocess is not None:
                y = np.asarray(postprocess(t, y_new), dtype=float)
                k_stages[6] = f(t, y)
            else:
                y = y_new
            ts.append(t)
            ys.append(y.copy())
            k_stages[0] = k_stages[6]
            n_steps += 1
            err_clamped = max(err, 1e-10)
            factor = SAFETY * err_clamped**-EXPONENT * err_prev**BETA
            err_prev = err_clamped
            h = h * min(MAX_FACTOR, max(MIN_FACTOR, factor))
            h = min(h, max_step)
        else:
            factor = SAFETY * err**-EXPONENT * err_prev**BETA
            h = h * min(1.0, max(MIN_FACTOR, factor))

    return DenseSolution(
        breakpoints=np.asarray(ts),
        states=np.asarray(ys),
        coefs=np.asarray(coef_list),
        steps=np.asarray(step_list),
    )
