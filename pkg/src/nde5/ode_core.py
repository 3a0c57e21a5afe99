"""Adaptive Dormand-Prince 5(4) integration with dense output and events.

This is the engine under the shooting and tail-classification code. All
profile ODEs in this package are smooth away from the degenerate set
g = 0, so an explicit embedded pair is enough; stiffness near g = 0 is
handled by regularising the right-hand sides, not here.

Integration may run in either direction (``t_end < t0`` is allowed, and
is the common case: profiles are shot from the origin towards z -> -oo).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import StepFailure

__all__ = [
    "IvpSpec",
    "Termination",
    "Trajectory",
    "integrate",
    "dense_eval",
]

# Butcher tableau (Dormand & Prince 1980).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array(
    [
        [0, 0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
        [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
    ]
)
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
# difference between the 5th and embedded 4th order weights
_E = np.array(
    [71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# continuous extension (Shampine 1986), columns are powers theta^1..theta^4
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
# PI controller exponents for a 5th order method (Hairer & Wanner)
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5


@dataclass(frozen=True)
class IvpSpec:
    """Initial value problem ``y' = rhs(t, y)``, ``y(t0) = y0`` on [t0, t_end].

    Each entry of ``events`` is a scalar function ``e(t, y)``; integration
    stops at the first root of any of them.
    """

    rhs: Callable[[float, np.ndarray], np.ndarray]
    t0: float
    y0: Sequence[float]
    t_end: float
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float = np.inf
    events: Sequence[Callable[[float, np.ndarray], float]] = ()
    overflow: float = 1e12
    first_step: float | None = None

    def __post_init__(self):
        if self.t_end == self.t0:
            raise ValueError("t_end must differ from t0")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")


@dataclass(frozen=True)
class Termination:
    """Why integration stopped.

    ``kind`` is one of ``ReachedEnd``, ``EventFired``, ``StepFailure`` or
    ``StateOverflow``.
    """

    kind: str
    index: int | None = None
    t: float | None = None
    threshold: float | None = None

    def __str__(self):
        if self.kind == "EventFired":
            return f"EventFired({self.index}, t*={self.t:.16g})"
        if self.kind == "StateOverflow":
            return f"StateOverflow({self.threshold:g})"
        if self.kind == "StepFailure":
            return f"StepFailure(t={self.t:.16g})"
        return self.kind


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Accepted nodes of an integration plus per-step dense-output data.

    ``t`` and ``y`` hold the nodes; step ``i`` runs from ``t[i]`` with
    nominal size ``h[i]`` and stage derivatives ``k[i]``. The final step may
    be cut short by an event, in which case ``t[-1]`` is the event time.
    """

    t: np.ndarray
    y: np.ndarray
    h: np.ndarray
    k: np.ndarray
    termination: Termination
    n_rhs: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def t_first(self) -> float:
        return float(self.t[0])

    @property
    def t_last(self) -> float:
        return float(self.t[-1])

    @property
    def direction(self) -> float:
        return 1.0 if self.t[-1] >= self.t[0] else -1.0

    def __call__(self, t):
        return dense_eval(self, t)


def _err_norm(err, y, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.max(np.abs(err) / scale))


def _initial_step(rhs, t0, y0, f0, direction, rtol, atol, max_step):
    scale = atol + rtol * np.abs(y0)
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, max_step)
    y1 = y0 + direction * h0 * f0
    f1 = np.asarray(rhs(t0 + direction * h0, y1), dtype=float)
    d2 = np.max(np.abs(f1 - f0) / scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, max_step)


def _dense(t_start, h, y_start, k, t):
    theta = (t - t_start) / h
    q = _P @ np.array([theta, theta**2, theta**3, theta**4])
    return y_start + h * (q @ k)


def _locate_root(event, t_a, t_b, e_a, t_start, h, y_start, k, tol):
    """Bisect ``event`` on the dense interpolant between t_a and t_b."""
    lo, hi, e_lo = t_a, t_b, e_a
    while abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        e_mid = event(mid, _dense(t_start, h, y_start, k, mid))
        if e_mid == 0.0:
            return mid
        if np.sign(e_mid) == np.sign(e_lo):
            lo, e_lo = mid, e_mid
        else:
            hi = mid
    return hi


def integrate(spec: IvpSpec) -> Trajectory:
    """Integrate an :class:`IvpSpec` and return the full :class:`Trajectory`.

    The run never raises for numerical trouble: a collapsing step is
    reported as ``StepFailure`` and a state exceeding ``spec.overflow`` in
    the max norm as ``StateOverflow``. Use :func:`require_end` to convert
    those into exceptions when the caller needs the whole span.
    """
    rhs = spec.rhs
    t = float(spec.t0)
    t_end = float(spec.t_end)
    direction = 1.0 if t_end > t else -1.0
    span = abs(t_end - t)
    h_min = 1e-14 * span
    rtol, atol = spec.rel_tol, spec.abs_tol
    y = np.array(spec.y0, dtype=float)
    f = np.asarray(rhs(t, y), dtype=float)
    if not np.all(np.isfinite(f)):
        raise ValueError("rhs is not finite at (t0, y0)")
    n = y.size
    n_rhs = 1

    if spec.first_step is None:
        h_abs = _initial_step(rhs, t, y, f, direction, rtol, atol, spec.max_step)
        n_rhs += 1
    else:
        h_abs = min(abs(spec.first_step), spec.max_step)

    events = list(spec.events)
    e_prev = [float(ev(t, y)) for ev in events]

    ts, ys, hs, ks = [t], [y.copy()], [], []
    termination = Termination("ReachedEnd")
    err_prev = 1e-4
    K = np.empty((7, n))

    while True:
        if direction * (t_end - t) <= 0:
            break
        h_abs = min(h_abs, spec.max_step, abs(t_end - t))
        rejected = False
        while True:
            if h_abs < h_min:
                termination = Termination("StepFailure", t=t)
                break
            h = direction * h_abs
            K[0] = f
            for s in range(1, 7):
                ys_stage = y + h * (_A[s, :s] @ K[:s])
                K[s] = rhs(t + _C[s] * h, ys_stage)
            n_rhs += 6
            y_new = ys_stage  # row 6 of _A equals _B (FSAL)
            if not np.all(np.isfinite(K)):
                h_abs *= _MIN_FACTOR
                rejected = True
                continue
            err = _err_norm(h * (_E @ K), y, y_new, rtol, atol)
            if err <= 1.0:
                if err == 0.0:
                    factor = _MAX_FACTOR
                else:
                    factor = _SAFETY * err ** (-_ALPHA) * err_prev**_BETA
                    factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
                if rejected:
                    factor = min(1.0, factor)
                err_prev = max(err, 1e-4)
                break
            h_abs *= max(_MIN_FACTOR, _SAFETY * err ** (-1 / 5))
            rejected = True
        if termination.kind == "StepFailure":
            break

        t_new = t + h
        if direction * (t_new - t_end) > 0 or abs(t_new - t_end) <= 1e-15 * span:
            t_new = t_end
        k_step = K.copy()

        fired = None
        for i, ev in enumerate(events):
            e_new = float(ev(t_new, y_new))
            if e_new == 0.0 or np.sign(e_new) != np.sign(e_prev[i]) and e_prev[i] != 0.0:
                tol = max(1e-12, 4 * np.finfo(float).eps * abs(t_new))
                t_star = _locate_root(ev, t, t_new, e_prev[i], t, h, y, k_step, tol)
                if fired is None or direction * (t_star - fired[1]) < 0:
                    fired = (i, t_star)
            e_prev[i] = e_new

        hs.append(h)
        ks.append(k_step)
        if fired is not None:
            i, t_star = fired
            y_star = _dense(t, h, y, k_step, t_star)
            ts.append(t_star)
            ys.append(y_star)
            termination = Termination("EventFired", index=i, t=t_star)
            break

        t, y = t_new, y_new
        f = K[6].copy()
        ts.append(t)
        ys.append(y.copy())
        if np.max(np.abs(y)) > spec.overflow:
            termination = Termination("StateOverflow", t=t, threshold=spec.overflow)
            break
        h_abs = h_abs * factor

    if hs:
        k_arr = np.array(ks)
        h_arr = np.array(hs)
    else:
        k_arr = np.empty((0, 7, n))
        h_arr = np.empty(0)
    return Trajectory(
        t=np.array(ts),
        y=np.array(ys),
        h=h_arr,
        k=k_arr,
        termination=termination,
        n_rhs=n_rhs,
    )


def dense_eval(traj: Trajectory, t):
    """Evaluate the continuous 4th-order interpolant at ``t`` (scalar or array)."""
    scalar = np.ndim(t) == 0
    tq = np.atleast_1d(np.asarray(t, dtype=float))
    lo, hi = min(traj.t_first, traj.t_last), max(traj.t_first, traj.t_last)
    slack = 1e-12 * max(1.0, abs(hi), abs(lo))
    if np.any(tq < lo - slack) or np.any(tq > hi + slack):
        raise ValueError(f"query outside trajectory span [{lo:g}, {hi:g}]")
    if traj.h.size == 0:
        out = np.repeat(traj.y[:1], tq.size, axis=0)
        return out[0] if scalar else out
    d = traj.direction
    # position along the direction of integration
    s_nodes = d * traj.t
    idx = np.searchsorted(s_nodes, d * tq, side="right") - 1
    idx = np.clip(idx, 0, traj.h.size - 1)
    out = np.empty((tq.size, traj.y.shape[1]))
    for j, (i, tt) in enumerate(zip(idx, tq)):
        if tt == traj.t[i]:
            out[j] = traj.y[i]
        elif tt == traj.t[i + 1]:
            out[j] = traj.y[i + 1]
        else:
            out[j] = _dense(traj.t[i], traj.h[i], traj.y[i], traj.k[i], tt)
    return out[0] if scalar else out


def require_end(traj: Trajectory) -> Trajectory:
    """Raise :class:`StepFailure` unless the run reached ``t_end`` or an event."""
    if traj.termination.kind == "StepFailure":
        raise StepFailure(f"step size collapsed at t = {traj.termination.t:.6g}")
    return traj
