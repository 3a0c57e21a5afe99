"""Verification of computed profiles: residuals, rates, jump relations, entropy tests."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .asymptotics import TailFit, fit_oscillatory_tail
from .errors import DegenerateFit, InsufficientTail
from .models import NdeKind, Profile, SimilarityParams, operator_residual, rescale

__all__ = [
    "fd_weights",
    "ResidualReport",
    "residual",
    "critical_solution",
    "weak_stationary_shock",
    "ExtendedProfile",
    "extend_profile",
    "RateReport",
    "l1_rate",
    "tv_growth",
    "l1_deficiency",
    "JumpJets",
    "flux_bracket",
    "rh_speed",
    "EntropyVerdict",
    "delta_entropy_test",
    "uniform_nde_symmetry_check",
]


def fd_weights(x0: float, x, m: int) -> np.ndarray:
    """Finite-difference weights for the m-th derivative at ``x0`` on nodes ``x``.

    Fornberg's recursion; returns the weights of derivative order ``m`` only.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    c = np.zeros((n, m + 1))
    c1, c4 = 1.0, x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def _stencil_derivative(z, values, m, width):
    """m-th derivative at interior nodes from centred stencils of ``width`` points."""
    half = width // 2
    idx = np.arange(half, z.size - half)
    out = np.empty(idx.size)
    for j, i in enumerate(idx):
        sl = slice(i - half, i + half + 1)
        out[j] = fd_weights(z[i], z[sl], m) @ values[sl]
    return idx, out


@dataclass
class ResidualReport:
    sup_jets: float
    l2_jets: float
    sup_fd: float
    l2_fd: float
    n_points: int

    def to_dict(self):
        return dict(self.__dict__)


def _l2(z, r):
    return float(np.sqrt(abs(np.trapezoid(r * r, z)))) if r.size > 1 else float(abs(r).sum())


def residual(family, prof: Profile, d5=None, params: SimilarityParams | None = None) -> ResidualReport:
    """Residual of the original ODE along a profile, computed two ways.

    * ``jets``: stored jets plus the fifth derivative from a seven-point
      stencil on the stored fourth derivative (or the supplied ``d5``);
    * ``fd``: every derivative differenced from the stored values alone
      (nine-point stencils).

    ``family`` is an :class:`NdeKind`, ``Blowup`` or ``Global``.
    """
    p = prof.ascending()
    if p.mesh.size < 64:
        raise ValueError("residual needs at least 64 mesh points")
    params = params or p.params
    z, J = p.mesh, p.jets
    rare = p.rarefaction
    if d5 is not None:
        d5 = np.asarray(d5, dtype=float)
        if prof.mesh[0] > prof.mesh[-1]:
            d5 = d5[::-1]
        idx = np.arange(z.size)
        g5 = d5
    else:
        idx, g5 = _stencil_derivative(z, J[:, 4], 1, 7)
    r_jets = operator_residual(family, z[idx], [*(J[idx, k] for k in range(5)), g5], params, rare)
    fd_idx = np.arange(4, z.size - 4)
    derivs = [J[fd_idx, 0]]
    for m in range(1, 6):
        derivs.append(_stencil_derivative(z, J[:, 0], m, 9)[1])
    r_fd = operator_residual(family, z[fd_idx], derivs, params, rare)
    return ResidualReport(
        float(np.max(np.abs(r_jets))),
        _l2(z[idx], r_jets),
        float(np.max(np.abs(r_fd))),
        _l2(z[fd_idx], r_fd),
        int(idx.size),
    )


def critical_solution(C: float = 1.0, mesh=None, alpha=None):
    """Polynomial blow-up profile ``f = C y - (4!/9!) y^5`` with analytic derivatives.

    Substitution leaves ``4 C y (21 alpha - 4)/105``, so the polynomial is
    exact at alpha = 4/21 (the default). Returns ``(profile, d5)``.
    """
    y = np.linspace(-5.0, 0.0, 201) if mesh is None else np.asarray(mesh, dtype=float)
    k = 24.0 / 362880.0
    jets = np.column_stack([C * y - k * y**5, C - 5 * k * y**4, -20 * k * y**3, -60 * k * y**2, -120 * k * y])
    d5 = np.full_like(y, -120 * k)
    alpha = Fraction(4, 21) if alpha is None else alpha
    prof = Profile("Blowup", SimilarityParams(alpha), y, jets, {"exact": "critical polynomial", "C": C})
    return prof, d5


def weak_stationary_shock(mesh=None):
    """``f = sqrt|y| sign y`` on y > 0 (alpha = 1/9) with analytic derivatives."""
    y = np.linspace(0.5, 5.0, 201) if mesh is None else np.asarray(mesh, dtype=float)
    if np.any(y <= 0):
        raise ValueError("mesh must stay on y > 0")
    coef = [1.0, 0.5, -0.25, 0.375, -0.9375, 3.28125]
    pw = [0.5, -0.5, -1.5, -2.5, -3.5, -4.5]
    d = [c * y**p for c, p in zip(coef, pw)]
    prof = Profile("Blowup", SimilarityParams(Fraction(1, 9)), y, np.column_stack(d[:5]), {"exact": "weak stationary shock"})
    return prof, d[5]


# ---------------------------------------------------------------------------
# profiles with an asymptotic tail


@dataclass
class ExtendedProfile:
    """Odd shock profile ``g`` normalised to ``g(-inf) = 1`` with a fitted tail.

    Inside the mesh the stored jets are used; beyond ``z_switch`` (< 0)
    the oscillatory tail model takes over. ``g(z) = -g(-z)`` for z > 0.
    """

    profile: Profile
    fit: TailFit | None
    z_switch: float

    def _left(self, z, order):
        z = np.asarray(z, dtype=float)
        out = np.empty_like(z)
        inside = z >= self.z_switch
        if np.any(inside):
            out[inside] = self.profile(z[inside], order)
        if np.any(~inside):
            if self.fit is None:
                raise InsufficientTail(f"z = {z[~inside].min():.4g} lies beyond the mesh and no tail fit is available")
            out[~inside] = self._tail(z[~inside], order)
        return out

    def _tail(self, z, order):
        f = self.fit
        r = -z
        ph = f.a0 * r**f.phase_exponent
        s, c = np.sin(ph), np.cos(ph)
        env = r**f.envelope_exponent
        if order == 0:
            return 1.0 + env * (f.A * s + f.B * c)
        # d/dz = -d/dr
        denv = f.envelope_exponent * r ** (f.envelope_exponent - 1)
        dph = f.a0 * f.phase_exponent * r ** (f.phase_exponent - 1)
        dr = denv * (f.A * s + f.B * c) + env * dph * (f.A * c - f.B * s)
        return -dr

    def __call__(self, z, order: int = 0):
        if order not in (0, 1):
            raise ValueError("only values and first derivatives are extended")
        z = np.asarray(z, dtype=float)
        zz = np.atleast_1d(z)
        out = np.empty_like(zz)
        neg = zz <= 0
        out[neg] = self._left(zz[neg], order)
        # odd extension: g(z) = -g(-z), g'(z) = g'(-z)
        sign = -1.0 if order == 0 else 1.0
        out[~neg] = sign * self._left(-zz[~neg], order)
        return out if z.ndim else float(out[0])


def extend_profile(prof: Profile, window=(-95.0, -25.0), level: float | None = None) -> ExtendedProfile:
    """Normalise a shock profile to far field 1 and attach a tail fit on ``window``."""
    p = prof.ascending()
    if level is None:
        level = p.provenance.get("far_field")
        if level is None:
            m = p.mesh <= 0.5 * p.mesh.min()
            level = float(np.mean(p.g[m]))
    if level <= 0:
        raise ValueError("far-field level must be positive")
    a = level ** (-0.2)
    q = rescale(p, a).ascending()
    wa, wb = window[0] * a, window[1] * a
    fit = fit_oscillatory_tail(q, (wa, wb), level=1.0)
    return ExtendedProfile(q, fit, float(wa))


# ---------------------------------------------------------------------------
# oscillation-aware quadrature


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


class _AbsIntegral:
    """Cumulative integral of ``|h|`` on [0, Z_max], split at the zeros of h.

    ``h`` is sampled at ``per_lobe`` points per expected half-period
    (phase a0 z^(5/4)), zeros are located by vectorised bisection, and
    each sign-definite piece is integrated by 16-point Gauss-Legendre.
    """

    def __init__(self, h, z_max, a0=0.535, q=1.25, per_lobe=8, refine=1):
        per_lobe *= refine
        n_lobes = a0 * z_max**q / np.pi + 2
        n = int(max(2000, per_lobe * n_lobes))
        # uniform in phase beyond z = 1, uniform below
        s = np.linspace(0.0, 1.0, n)
        grid = np.concatenate([np.linspace(0.0, 1.0, 200)[:-1], 1.0 + (z_max**q - 1.0) * s]) if z_max > 1 else None
        if grid is None:
            grid = np.linspace(0.0, z_max, n)
        else:
            grid[199:] = grid[199:] ** (1.0 / q)
        hv = h(grid)
        flip = np.nonzero(np.sign(hv[:-1]) * np.sign(hv[1:]) < 0)[0]
        a, b = grid[flip].copy(), grid[flip + 1].copy()
        fa = hv[flip]
        for _ in range(60):
            m = 0.5 * (a + b)
            fm = h(m)
            left = np.sign(fm) == np.sign(fa)
            a = np.where(left, m, a)
            fa = np.where(left, fm, fa)
            b = np.where(left, b, m)
        zeros = 0.5 * (a + b)
        # split long pieces so the 16-point rule stays accurate
        knots = np.unique(np.concatenate([[0.0], zeros, grid[:: max(1, per_lobe)], [z_max]]))
        lo, hi = knots[:-1], knots[1:]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        pts = mid[:, None] + half[:, None] * _GL_X[None, :]
        vals = np.abs(h(pts.ravel())).reshape(pts.shape)
        pieces = half * (vals @ _GL_W)
        self.knots = knots
        self.cum = np.concatenate([[0.0], np.cumsum(pieces)])
        self.h = h

    def __call__(self, Z):
        Z = np.atleast_1d(np.asarray(Z, dtype=float))
        i = np.clip(np.searchsorted(self.knots, Z) - 1, 0, self.knots.size - 2)
        lo = self.knots[i]
        half = 0.5 * (Z - lo)
        pts = (lo + half)[:, None] + half[:, None] * _GL_X[None, :]
        vals = np.abs(self.h(pts.ravel())).reshape(pts.shape)
        return self.cum[i] + half * (vals @ _GL_W)


@dataclass
class RateReport:
    quantity: str
    x: np.ndarray
    values: np.ndarray
    exponent: float
    fit_residual: float
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.size < 5 or np.log10(x.max() / x.min()) < 1.5:
            raise ValueError("a rate report needs >= 5 samples spanning >= 1.5 decades")

    def to_dict(self):
        return {
            "quantity": self.quantity,
            "x": np.asarray(self.x).tolist(),
            "values": np.asarray(self.values).tolist(),
            "exponent": self.exponent,
            "fit_residual": self.fit_residual,
            **self.extra,
        }


def _loglog_fit(x, v, quantity, extra=None):
    x, v = np.asarray(x, dtype=float), np.asarray(v, dtype=float)
    if np.all(v == 0) or np.any(v < 0):
        raise DegenerateFit(f"{quantity}: values vanish, exponent undefined")
    if np.any(v == 0):
        raise DegenerateFit(f"{quantity}: some values vanish")
    A = np.column_stack([np.log(x), np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, np.log(v), rcond=None)
    res = float(np.sqrt(np.mean((A @ coef - np.log(v)) ** 2)))
    return RateReport(quantity, x, v, float(coef[0]), res, extra or {})


def l1_rate(ext: ExtendedProfile, l: float = 1.0, t_grid=None, refine: int = 1) -> RateReport:
    """Fit ``||g(x/(-t)^(1/5)) - S_(x)||_L1(-l, l) ~ (-t)^theta``.

    By oddness the norm equals ``2 tau * int_0^{l/tau} |g(-s) - 1| ds`` with
    ``tau = (-t)^(1/5)``.
    """
    t = np.geomspace(1e-25, 1e-10, 9) if t_grid is None else np.abs(np.asarray(t_grid, dtype=float))
    tau = t**0.2
    Z = l / tau
    a0 = ext.fit.a0 if ext.fit else 0.535
    integ = _AbsIntegral(lambda s: ext(-s) - 1.0, Z.max(), a0=a0, refine=refine)
    norms = 2 * tau * integ(Z)
    return _loglog_fit(t, norms, "l1_distance", {"l": l})


def tv_growth(ext: ExtendedProfile, Z_grid=None, refine: int = 1) -> RateReport:
    """Partial total variation ``int_{-Z}^0 |g'|`` and its growth exponent."""
    Z = np.geomspace(1e3, 1e5, 9) if Z_grid is None else np.asarray(Z_grid, dtype=float)
    a0 = ext.fit.a0 if ext.fit else 0.535
    integ = _AbsIntegral(lambda s: ext(-s, 1), Z.max(), a0=a0, refine=refine)
    tv = integ(Z)
    if np.all(tv <= 1e-14):
        # a constant profile has no variation to grow
        return RateReport("total_variation", Z, tv, 0.0, 0.0)
    return _loglog_fit(Z, tv, "total_variation")


def l1_deficiency(ext: ExtendedProfile, Z_grid=None, refine: int = 1) -> RateReport:
    """``int_{-Z}^0 |g - 1|``, which grows without bound (g - 1 is not integrable)."""
    Z = np.geomspace(1e3, 1e5, 9) if Z_grid is None else np.asarray(Z_grid, dtype=float)
    a0 = ext.fit.a0 if ext.fit else 0.535
    integ = _AbsIntegral(lambda s: ext(-s) - 1.0, Z.max(), a0=a0, refine=refine)
    return _loglog_fit(Z, integ(Z), "l1_deficiency")


# ---------------------------------------------------------------------------
# Rankine-Hugoniot


@dataclass(frozen=True)
class JumpJets:
    minus: tuple
    plus: tuple

    def __post_init__(self):
        if len(self.minus) != 5 or len(self.plus) != 5:
            raise ValueError("one-sided jets need five entries F0..F4")


def flux_bracket(F) -> float:
    """``(F F')''' = F0 F4 + 4 F1 F3 + 3 F2^2``."""
    F0, F1, F2, F3, F4 = F
    return F0 * F4 + 4 * F1 * F3 + 3 * F2 * F2


def rh_speed(j: JumpJets):
    """Shock speed ``lambda = [(F F')''']/[F]`` and the numerator itself."""
    jump = j.plus[0] - j.minus[0]
    if jump == 0:
        raise ValueError("no jump: F0+ equals F0-")
    num = flux_bracket(j.plus) - flux_bracket(j.minus)
    return num / jump, num


# ---------------------------------------------------------------------------
# delta-entropy test


@dataclass
class EntropyVerdict:
    shock: str
    verdict: str
    deltas: np.ndarray
    distances: np.ndarray
    slope: float
    window: dict

    def to_dict(self):
        return {
            "shock": self.shock,
            "verdict": self.verdict,
            "deltas": np.asarray(self.deltas).tolist(),
            "distances": np.asarray(self.distances).tolist(),
            "slope": self.slope,
            "window": self.window,
        }

    def to_csv(self) -> str:
        rows = ["delta,distance"] + [f"{d:.16g},{v:.16g}" for d, v in zip(self.deltas, self.distances)]
        return "\n".join(rows) + "\n"


def _window_quadrature(func, xa, xb, ta, tb, n=160):
    xg, wg = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (xa + xb) + 0.5 * (xb - xa) * xg
    t = 0.5 * (ta + tb) + 0.5 * (tb - ta) * xg
    X, T = np.meshgrid(x, t, indexing="ij")
    W = np.outer(wg, wg) * 0.25 * (xb - xa) * (tb - ta)
    return float(np.sum(W * func(X, T)))


def _odd_eval(prof_or_ext, z):
    if isinstance(prof_or_ext, ExtendedProfile):
        return prof_or_ext(z)
    p = prof_or_ext.ascending()
    za = np.abs(z)
    if za.max() > -p.mesh.min() + 1e-12:
        raise InsufficientTail(f"window reaches |z| = {za.max():.4g} beyond the mesh (|z| <= {-p.mesh.min():.4g})")
    return np.where(z <= 0, p(-za), -p(-za))


def delta_entropy_test(shock: str, prof, deltas, window=None) -> EntropyVerdict:
    """Similarity-level delta-entropy test for ``S-`` (blow-up) or ``S+`` (Riemann) shocks.

    ``prof`` is an odd shock profile (or an :class:`ExtendedProfile`)
    normalised to ``g(-inf) = 1``.

    * ``S-``: ``d(delta) = int int |g(x/(-t)^(1/5)) - g(x/(delta-t)^(1/5))|``
      over the window (t < 0); Entropy iff d falls off with a positive
      power of delta.
    * ``S+``: the rarefaction ``u+(x, t) = g(-x/t^(1/5))`` started from the
      shifted time ``delta``: ``e(delta) = int int |u+(x, t + delta) - sign x|``
      over the window (t > 0); NonEntropy iff e stays bounded away from 0.
    """
    deltas = np.sort(np.asarray(list(deltas), dtype=float))
    if deltas.size == 0:
        raise ValueError("empty delta list")
    if np.any(deltas <= 0):
        raise ValueError("deltas must be positive")
    key = shock.replace("_", "-").lower()
    if key in ("s-", "s-minus", "sminus", "s-blowup"):
        win = window or {"x": (-1.0, 1.0), "t": (-1.0, -0.1)}
        (xa, xb), (ta, tb) = win["x"], win["t"]
        _odd_eval(prof, np.array([xa, xb]) / (-tb) ** 0.2)

        def dist(d):
            return _window_quadrature(
                lambda X, T: np.abs(_odd_eval(prof, X / (-T) ** 0.2) - _odd_eval(prof, X / (d - T) ** 0.2)),
                xa, xb, ta, tb,
            )

        vals = np.array([dist(d) for d in deltas])
        slope = float(np.polyfit(np.log(deltas), np.log(np.maximum(vals, 1e-300)), 1)[0])
        decades = np.log10(deltas.max() / deltas.min())
        verdict = "Entropy" if slope > 0 and decades >= 3 and vals[0] < vals[-1] else "NonEntropy"
        name = "S-"
    elif key in ("s+", "s-plus", "splus", "s-riemann"):
        win = window or {"x": (-1.0, 1.0), "t": (0.1, 1.0)}
        (xa, xb), (ta, tb) = win["x"], win["t"]
        _odd_eval(prof, np.array([xa, xb]) / ta**0.2)

        def dist(d):
            return _window_quadrature(
                lambda X, T: np.abs(_odd_eval(prof, -X / (T + d) ** 0.2) - np.sign(X)),
                xa, xb, ta, tb,
            )

        vals = np.array([dist(d) for d in deltas])
        slope = float(np.polyfit(np.log(deltas), np.log(np.maximum(vals, 1e-300)), 1)[0])
        area = (xb - xa) * (tb - ta)
        floor = 1e-3 * area
        verdict = "NonEntropy" if vals.min() > floor and vals[0] > 0.5 * vals[-1] else "Entropy"
        name = "S+"
    else:
        raise ValueError(f"unknown shock {shock!r}")
    return EntropyVerdict(name, verdict, deltas, vals, slope, {"x": [xa, xb], "t": [ta, tb]})


def uniform_nde_symmetry_check(prof: Profile, rtol: float = 2.0, atol: float = 1e-12) -> bool:
    """True when ``-g`` solves the same ODE as ``g`` (residuals agree within ``rtol``x)."""
    kind = NdeKind.parse(prof.kind)
    if np.all(prof.jets == 0):
        return True
    neg = replace(prof, jets=-prof.jets)
    r1 = residual(kind, prof).sup_jets
    r2 = residual(kind, neg).sup_jets
    if max(r1, r2) < atol:
        return True
    lo, hi = sorted((r1, r2))
    return hi <= rtol * max(lo, atol)
