"""One-parameter shooting with tail classification.

Shock profiles are shot in the D-family ``g = C z + D z^3 + ...`` from a
small offset left of the origin, blow-up profiles in ``f'''(0)``; the
fifth-order-in-time profile reduces to a scalar phase-plane ODE.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import Nde5Error, SameClassAtBracket, StepFailure
from .models import (
    DEFAULT_NU,
    DEGENERATE_KINDS,
    NdeKind,
    Profile,
    SimilarityParams,
    _Poly,
    rhs_blowup,
    rhs_phase_plane,
    rhs_shock,
    series_origin,
)
from .ode_core import IvpSpec, Trajectory, dense_eval, integrate

__all__ = [
    "TailClass",
    "ShootResult",
    "classify_tail",
    "shoot_shock",
    "shoot_blowup",
    "blowup_series",
    "shoot_time5",
    "SweepEntry",
    "sweep_family",
    "sweep_report_json",
]

QUINTIC_NORM = {"Shock": 120.0, "Blowup": 15120.0}


@dataclass(frozen=True)
class TailClass:
    """Tail classification of one shooting run.

    ``tag`` is ``QuinticGrowth``, ``SignChange``, ``ProperOscillatory``
    or ``Undecided``; ``z0`` is set for ``SignChange`` only.
    """

    tag: str
    z0: float | None = None
    evidence: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in ("QuinticGrowth", "SignChange", "ProperOscillatory", "Undecided"):
            raise ValueError(f"unknown tail class {self.tag!r}")
        if self.tag == "SignChange" and not (self.z0 is not None and np.isfinite(self.z0) and self.z0 < 0):
            raise ValueError("SignChange needs a finite z0 < 0")

    def __str__(self):
        return f"SignChange(z0={self.z0:.6g})" if self.tag == "SignChange" else self.tag


@dataclass
class ShootResult:
    parameter_name: str
    bracket: tuple
    value: float
    profile: Profile
    history: list
    reliable_to: float | None = None

    def to_dict(self):
        return {
            "parameter": self.parameter_name,
            "value": self.value,
            "bracket": list(self.bracket),
            "reliable_to": self.reliable_to,
            "history": [[p, str(c)] for p, c in self.history],
        }


def classify_tail(
    traj: Trajectory,
    family: str = "Shock",
    eta: float = 0.5,
    level: float = 1.0,
    z_min: float = 20.0,
) -> TailClass:
    """Classify the far-field behaviour of a run integrated towards z -> -inf.

    ``family`` selects the quintic normalisation: ``|z|^5/120`` for shock
    profiles, ``|y|^5/15120`` for blow-up profiles.
    """
    if family not in QUINTIC_NORM:
        raise ValueError(f"unknown family {family!r}")
    term = traj.termination
    z_end = traj.t_last
    g = traj.y[:, 0]
    ev = {"last_z": z_end, "termination": term.kind}
    if term.kind == "EventFired" and term.index == 0:
        return TailClass("SignChange", z0=term.t, evidence={**ev, "form": "g = 0 crossing"})
    if term.kind in ("StepFailure", "StateOverflow") and abs(g[-1]) < 0.1 * np.max(np.abs(g)):
        # vanishing like sqrt|z - z0|: the step collapses (or the higher
        # derivatives explode) right at the zero while g itself is tiny
        return TailClass("SignChange", z0=z_end, evidence={**ev, "form": "sqrt vanishing bundle"})

    span = abs(z_end)
    start = max(span / 10.0, abs(traj.t_first))
    if span >= z_min and span > start:
        zs = np.sign(z_end) * np.geomspace(start, span, 50)
        vals = dense_eval(traj, zs)[:, 0]
        ratio = np.abs(vals) / (np.abs(zs) ** 5 / QUINTIC_NORM[family])
        if np.all((ratio >= 0.5) & (ratio <= 2.0)):
            return TailClass(
                "QuinticGrowth",
                evidence={**ev, "form": f"|z|^5/{QUINTIC_NORM[family]:g}", "ratio_range": [ratio.min(), ratio.max()]},
            )
    if term.kind == "ReachedEnd" and span >= z_min:
        tail = np.abs(traj.t) >= span / 2
        in_band = np.all(np.abs(g[tail] - level) <= eta)
        third = np.abs(traj.t) >= 2 * span / 3
        mid = tail & ~third
        if in_band and mid.any() and third.any():
            lev = np.mean(g[tail])
            if np.max(np.abs(g[third] - lev)) <= np.max(np.abs(g[mid] - lev)) + 1e-12:
                return TailClass("ProperOscillatory", evidence={**ev, "form": "decaying oscillation", "level": lev})
    return TailClass("Undecided", evidence=ev)


def _zero_event(z, y):
    return y[0]


def _trajectory_profile(kind, params, trajs_and_prefix, provenance, rarefaction=False) -> Profile:
    mesh = np.concatenate([m for m, _ in trajs_and_prefix])
    jets = np.concatenate([j for _, j in trajs_and_prefix])
    order = np.argsort(mesh)
    mesh, jets = mesh[order], jets[order]
    keep = np.concatenate([[True], np.diff(mesh) > 0])
    return Profile(kind, params, mesh[keep], jets[keep], provenance, rarefaction)


def _divergence_point(ta: Trajectory, tb: Trajectory, threshold: float = 1e-3) -> float:
    """First |z| at which two neighbouring shooting runs separate by ``threshold``."""
    lo = max(min(ta.t_first, ta.t_last), min(tb.t_first, tb.t_last))
    hi = min(max(ta.t_first, ta.t_last), max(tb.t_first, tb.t_last))
    zs = np.linspace(hi, lo, 4000)
    d = np.abs(dense_eval(ta, zs)[:, 0] - dense_eval(tb, zs)[:, 0])
    bad = np.nonzero(d > threshold)[0]
    return float(zs[bad[0]]) if bad.size else float(lo)


def _bisect(run, classify, lo, hi, tol, max_iter=200):
    ra, rb = run(lo), run(hi)
    ca, cb = classify(ra), classify(rb)
    history = [(lo, ca), (hi, cb)]
    if ca.tag == cb.tag:
        raise SameClassAtBracket(f"both bracket ends classify as {ca.tag}")
    mid_run, mid = None, None
    for _ in range(max_iter):
        if abs(hi - lo) < tol:
            break
        mid = 0.5 * (lo + hi)
        mid_run = run(mid)
        cm = classify(mid_run)
        history.append((mid, cm))
        if cm.tag == ca.tag:
            lo, ra = mid, mid_run
        elif cm.tag == cb.tag:
            hi, rb = mid, mid_run
        else:
            # a third class at the midpoint: the domain cannot resolve further
            break
    mid = 0.5 * (lo + hi)
    mid_run = run(mid)
    history.append((mid, classify(mid_run)))
    return lo, hi, mid, mid_run, ra, rb, history


def shoot_shock(
    kind=NdeKind.N50,
    bracket=(-1.0, 1.0),
    tol: float = 1e-6,
    C: float = -1.0,
    z_init: float = 1e-2,
    Z: float = 1000.0,
    nu: float = DEFAULT_NU,
    order: int = 7,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
) -> ShootResult:
    """Bisect the cubic coefficient D of the origin series between tail classes.

    The returned profile is the midpoint run on ``[-reliable_to, 0]`` (the
    stretch where the two final bracket runs agree to 1e-3) with the
    series filling ``[-z_init, 0]``.
    """
    kind = NdeKind.parse(kind)
    if kind not in DEGENERATE_KINDS:
        raise ValueError(f"{kind.value} profiles are not odd; solve them with bvp.uniform_profile")
    rhs = rhs_shock(kind, nu)

    def run(D):
        ser = series_origin(kind, C, D, order)
        spec = IvpSpec(rhs, -z_init, ser(-z_init), -Z, rel_tol, abs_tol, events=(_zero_event,))
        traj = integrate(spec)
        traj.meta["series"] = ser
        return traj

    def classify(traj):
        return classify_tail(traj, "Shock")

    lo, hi, mid, traj, ra, rb, history = _bisect(run, classify, float(bracket[0]), float(bracket[1]), tol)
    reliable = _divergence_point(ra, rb)
    ser = traj.meta["series"]
    zs0 = np.linspace(0.0, -z_init, 9)[:-1]
    prefix = (zs0, np.array([ser(z) for z in zs0]))
    keep = traj.t >= reliable
    prov = {
        "method": "shooting",
        "parameter": "D",
        "D": mid,
        "C": C,
        "bracket": [lo, hi],
        "z_init": z_init,
        "nu": nu,
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
        "series_order": order,
        "reliable_to": reliable,
        "class": str(history[-1][1]),
    }
    prof = _trajectory_profile(kind, SimilarityParams(0.0), [prefix, (traj.t[keep], traj.y[keep])], prov)
    return ShootResult("D", (lo, hi), mid, prof, history, reliable)


def blowup_series(p: SimilarityParams, f1: float, f3: float, order: int = 7):
    """Odd series ``f1 y + f3 y^3/6 + c5 y^5 + ...`` of the blow-up ODE, matched term by term."""
    if order < 3 or order % 2 == 0 or order > 9:
        raise ValueError("order must be odd, 3 <= order <= 9")
    alpha, beta = Fraction(p.alpha).limit_denominator(10**9), Fraction(p.beta).limit_denominator(10**9)
    y = _Poly([0, 1])

    def residual(c):
        f = _Poly(c)
        quad = (f * f.deriv()).deriv(4)
        return (quad * -1) + (f.deriv() * y) * (-beta) + f * alpha

    coeffs = [0, Fraction(f1), 0, Fraction(f3) / 6]
    for k in range(5, order + 1, 2):
        r0 = residual(coeffs + [0, 0]).coef(k - 4)
        r1 = residual(coeffs + [0, 1]).coef(k - 4)
        coeffs = coeffs + [0, -r0 / (r1 - r0)]
    c = [float(v) for v in coeffs]

    def jet(x):
        out = np.zeros(5)
        for m in range(5):
            for k in range(m, len(c)):
                if c[k]:
                    fall = np.prod(np.arange(k, k - m, -1)) if m else 1
                    out[m] += c[k] * fall * x ** (k - m)
        return out

    jet.coeffs = tuple(c)
    return jet


def shoot_blowup(
    p: SimilarityParams,
    f1: float = -1.0,
    bracket=(-1.0, 1.0),
    tol: float = 1e-10,
    f0: float = 0.0,
    y_init: float = 1e-2,
    Y: float = 4000.0,
    nu: float = DEFAULT_NU,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
) -> ShootResult:
    """Bisect f'''(0) between quintic growth and finite-point vanishing for y < 0.

    With ``f0 = 0`` the run starts from the odd series at ``-y_init``;
    with ``f0 != 0`` (collapse of a shock) the ODE is regular at the origin
    and the jet ``(f0, f1, 0, f3, 0)`` is used directly.
    """
    if f1 == 0:
        raise ValueError("f1 must be nonzero")
    rhs = rhs_blowup(p, nu)

    def run(f3):
        if f0 == 0:
            ser = blowup_series(p, f1, f3)
            t0, start = -y_init, ser(-y_init)
        else:
            t0, start = 0.0, np.array([f0, f1, 0.0, f3, 0.0])
        spec = IvpSpec(rhs, t0, start, -Y, rel_tol, abs_tol, events=(_zero_event,))
        traj = integrate(spec)
        traj.meta["start"] = (t0, start)
        return traj

    def classify(traj):
        return classify_tail(traj, "Blowup")

    lo, hi, mid, traj, ra, rb, history = _bisect(run, classify, float(bracket[0]), float(bracket[1]), tol)
    reliable = _divergence_point(ra, rb)
    keep = traj.t >= reliable
    pieces = [(traj.t[keep], traj.y[keep])]
    if f0 == 0:
        ser = blowup_series(p, f1, mid)
        zs0 = np.linspace(0.0, -y_init, 9)[:-1]
        pieces.insert(0, (zs0, np.array([ser(z) for z in zs0])))
    prov = {
        "method": "shooting",
        "parameter": "f3",
        "f3": mid,
        "f0": f0,
        "f1": f1,
        "sign_convention": "f'(0) = %+g, profile on y < 0" % f1,
        "bracket": [lo, hi],
        "nu": nu,
        "reliable_to": reliable,
        "class": str(history[-1][1]),
    }
    prof = _trajectory_profile("Blowup", p, pieces, prov)
    return ShootResult("f3", (lo, hi), mid, prof, history, reliable)


def _singular_event_factory(rhs):
    ev = rhs.singular_event

    def event(z, y):
        return ev(z, y)

    return event


def shoot_time5(
    A: float = 1.0,
    B: float = 0.0,
    Z: float = 1e4,
    z_init: float = 1e-3,
    normalize: bool = True,
    extend: bool = True,
    rel_tol: float = 1e-12,
    abs_tol: float = 1e-14,
) -> Profile:
    """Integrate ``dg/dz = (A z + B z^3)/(g - z^5)`` from 0- to -Z.

    Near the origin ``g^2 = A z^2 + B z^4/2`` selects the branch with
    ``g'(0) = -sqrt(A)``. The far field ``g(-inf)`` is extrapolated from the
    tail ``g ~ L + B/z + A/(3 z^3)``. With ``normalize`` the profile is
    rescaled by ``g_a(z) = a^5 g(z/a)`` to ``g(-inf) = 1``; this maps
    ``(A, B)`` to ``(a^8 A, a^6 B)``, recorded in the provenance.
    """
    rhs = rhs_phase_plane(A, B)
    g_start = np.sqrt(A * z_init**2 + 0.5 * B * z_init**4)
    spec = IvpSpec(rhs, -z_init, [g_start], -Z, rel_tol, abs_tol, events=(_singular_event_factory(rhs),))
    traj = integrate(spec)
    if traj.termination.kind == "EventFired":
        raise Nde5Error(f"hit the singular manifold g = z^5 at z = {traj.termination.t:.6g}")
    if traj.termination.kind == "StepFailure":
        raise StepFailure(f"phase-plane integration failed at z = {traj.t_last:.6g}")
    z_end, g_end = traj.t_last, traj.y[-1, 0]
    limit = g_end - B / z_end - A / (3 * z_end**3)
    z = np.concatenate([[0.0], traj.t])
    g = np.concatenate([[0.0], traj.y[:, 0]])
    a = 1.0
    if normalize:
        a = limit ** (-0.2)
        z, g = z * a, g * a**5
    A_eff, B_eff = a**8 * A, a**6 * B
    g1 = (A_eff * z + B_eff * z**3) / np.where(g - z**5 == 0, np.inf, g - z**5)
    g1[0] = -np.sqrt(A_eff)
    # higher derivatives are not carried by the first-order ODE; difference them
    order = np.argsort(z)
    zs, gs, g1s = z[order], g[order], g1[order]
    g2 = np.gradient(g1s, zs, edge_order=2)
    g3 = np.gradient(g2, zs, edge_order=2)
    g4 = np.gradient(g3, zs, edge_order=2)
    jets = np.column_stack([gs, g1s, g2, g3, g4])
    if extend:
        parity = np.array([-1.0, 1.0, -1.0, 1.0, -1.0])
        zs = np.concatenate([zs, -zs[::-1][1:]])
        jets = np.concatenate([jets, (jets * parity)[::-1][1:]])
    prov = {
        "method": "phase-plane integration",
        "A": A,
        "B": B,
        "A_effective": A_eff,
        "B_effective": B_eff,
        "raw_far_field": limit,
        "scale": a,
        "normalized": normalize,
        "rel_tol": rel_tol,
        "higher_derivatives": "finite differences of g'",
    }
    return Profile(NdeKind.Time5, SimilarityParams(0.0), zs, jets, prov)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepEntry:
    params: tuple
    status: str
    profile: Profile | None = None
    error: str | None = None
    metrics: dict = field(default_factory=dict)

    def to_dict(self):
        return {"params": list(self.params), "status": self.status, "error": self.error, "metrics": self.metrics}


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("NDE5_THREADS", "1")))
    except ValueError:
        return 1


def _tail_slope(prof: Profile, window):
    za, zb = sorted(window)
    m = (prof.mesh >= za) & (prof.mesh <= zb) & (np.abs(prof.g) > 0)
    if m.sum() < 5:
        return None
    return float(np.polyfit(np.log(np.abs(prof.mesh[m])), np.log(np.abs(prof.g[m])), 1)[0])


def _solve_one(family, params, solver, options):
    if family == "Global":
        from .bvp import solve_global

        alpha, c0, F0, F1 = params
        sol = solve_global(SimilarityParams(alpha, c0), F0, F1, **options)
        prof = sol.profile
        L = -prof.mesh.min()
        slope = _tail_slope(prof, (-L, -0.2 * L))
        return prof, {"tail_exponent": slope, "residual": sol.residual, "iterations": sol.iterations}
    if family == "Shock":
        kind, lo, hi = params
        res = shoot_shock(kind, (lo, hi), **options)
        return res.profile, {"D": res.value, "reliable_to": res.reliable_to}
    if family == "Blowup":
        alpha, f1, lo, hi = params
        res = shoot_blowup(SimilarityParams(alpha), f1, (lo, hi), **options)
        return res.profile, {"f3": res.value, "reliable_to": res.reliable_to}
    raise ValueError(f"unknown family {family!r}")


def sweep_family(family: str, grid, solver: str = "bvp", threads: int | None = None, **options) -> list:
    """Solve every grid tuple independently; failures are recorded, not raised.

    ``family`` is ``Global`` (tuples ``(alpha, c0, F0, F1)``, BVP),
    ``Shock`` (``(kind, D_lo, D_hi)``, shooting) or ``Blowup``
    (``(alpha, f1, f3_lo, f3_hi)``, shooting).
    """
    grid = list(grid)
    if not grid:
        return []
    if family not in ("Global", "Shock", "Blowup"):
        raise ValueError(f"unknown family {family!r}")

    def work(params):
        try:
            prof, metrics = _solve_one(family, tuple(params), solver, options)
            return SweepEntry(tuple(params), "converged", prof, None, metrics)
        except (Nde5Error, ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            return SweepEntry(tuple(params), "failed", None, f"{type(exc).__name__}: {exc}")

    n = min(threads or _thread_cap(), len(grid))
    if n <= 1:
        return [work(p) for p in grid]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(work, grid))


def sweep_report_json(entries) -> str:
    return json.dumps([e.to_dict() for e in entries], indent=2, default=float)
