"""Collocation BVP solver with asymptotic boundary closures.

The first-order system ``y' = f(z, y)`` (five components) is discretised
by Hermite-Simpson collocation, a fourth-order scheme, on a graded mesh.
The nonlinear system is solved by Newton's method with Armijo
backtracking and a sparse Jacobian built from finite differences of the
vectorised right-hand side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, onenormest, splu

from .errors import NewtonDiverged, SingularJacobian
from .models import (
    DEFAULT_NU,
    DEGENERATE_KINDS,
    NdeKind,
    Profile,
    SimilarityParams,
    rhs_blowup,
    rhs_global,
    rhs_shock,
    series_origin,
)

__all__ = [
    "Conditions",
    "SeriesConditions",
    "FixConstant",
    "AlgebraicTail",
    "OscillatoryDamped",
    "BvpSpec",
    "BvpSolution",
    "make_mesh",
    "solve_bvp",
    "continuation",
    "polish_shock",
    "solve_global",
    "blowup_profile",
    "blowup_continuation",
    "uniform_profile",
]

_FD_REL = 1e-7


def _fd_jac_point(func, y, *args):
    """Dense Jacobian of a small vector function by forward differences."""
    f0 = np.asarray(func(y, *args), dtype=float)
    J = np.empty((f0.size, y.size))
    for j in range(y.size):
        dy = _FD_REL * max(1.0, abs(y[j]))
        yp = y.copy()
        yp[j] += dy
        J[:, j] = (np.asarray(func(yp, *args)) - f0) / dy
    return f0, J


# ---------------------------------------------------------------------------
# boundary conditions


@dataclass(frozen=True)
class Conditions:
    """Linear conditions ``rows @ y = values`` at one end."""

    rows: np.ndarray
    values: np.ndarray

    @classmethod
    def fixed(cls, spec: dict) -> "Conditions":
        """Conditions ``d_k = v`` from a mapping ``{k: v}``."""
        ks = sorted(spec)
        if any(k not in range(5) for k in ks):
            raise ValueError("jet components are numbered 0..4")
        rows = np.zeros((len(ks), 5))
        rows[np.arange(len(ks)), ks] = 1.0
        return cls(rows, np.array([float(spec[k]) for k in ks]))

    @property
    def count(self) -> int:
        return len(self.values)

    def residual(self, z, y, rhs, side):
        return self.rows @ y - self.values


@dataclass(frozen=True)
class SeriesConditions:
    """The end state must lie on a one-parameter curve ``y = S(p)``.

    Used at ``z = -z_init`` next to a singular origin: ``S`` is the origin
    series jet with the shooting parameter ``p`` free, giving four
    conditions. ``p`` is recovered by projecting ``y`` onto the curve.
    """

    series: Callable  # p -> jet at the end point
    p0: float

    @property
    def count(self) -> int:
        return 4

    def parameter(self, y) -> float:
        p = self.p0
        for _ in range(30):
            s = self.series(p)
            dp = 1e-6 * max(1.0, abs(p))
            ds = (self.series(p + dp) - s) / dp
            step = ds @ (y - s) / (ds @ ds)
            p += step
            if abs(step) < 1e-15 * max(1.0, abs(p)):
                break
        return p

    def residual(self, z, y, rhs, side):
        p = self.parameter(y)
        s = self.series(p)
        dp = 1e-6 * max(1.0, abs(p))
        ds = (self.series(p + dp) - s) / dp
        # orthonormal complement of the tangent
        q, _ = np.linalg.qr(np.column_stack([ds, np.eye(5)]))
        return q[:, 1:5].T @ (y - s)


@dataclass(frozen=True)
class FixConstant:
    """Constant equilibrium at the end: ``d0 = c``, ``d1 = d2 = 0``."""

    c: float

    @property
    def count(self) -> int:
        return 3

    def residual(self, z, y, rhs, side):
        return np.array([y[0] - self.c, y[1], y[2]])


@dataclass(frozen=True)
class AlgebraicTail:
    """Algebraic tail ``C0 |z|^e``: value, slope and curvature imposed."""

    c0: float
    exponent: float

    @property
    def count(self) -> int:
        return 3

    def target(self, z):
        r, e, c = abs(z), self.exponent, self.c0
        s = np.sign(z)
        return np.array([c * r**e, s * e * c * r ** (e - 1), e * (e - 1) * c * r ** (e - 2)])

    def residual(self, z, y, rhs, side):
        return y[:3] - self.target(z)


@dataclass(frozen=True)
class OscillatoryDamped:
    """Eliminate the modes that grow towards the end of the domain.

    The right-hand side is linearised at the end state; for each of the
    ``n_modes`` eigenvalues growing outward (most negative real part at a
    left end, most positive at a right end) the left eigenvector ``l``
    gives one condition ``l . (y - y_base) = 0``. The base state has the
    current value and the derivatives of ``value * (|z|/|z_end|)^base_exponent``.
    With ``level`` set, the eigenvalue nearest zero adds ``l0 . y = level``
    (the level of the slow mode, normalised so that ``l0[0] = 1``).
    """

    n_modes: int = 1
    level: float | None = None
    base_exponent: float = 0.0

    @property
    def count(self) -> int:
        return self.n_modes + (self.level is not None)

    def _base(self, z, y):
        e = self.base_exponent
        out = np.zeros(5)
        out[0] = y[0]
        fall = 1.0
        for k in range(1, 5):
            fall *= e - (k - 1)
            out[k] = y[0] * fall / z**k
        return out

    def residual(self, z, y, rhs, side):
        def f(v):
            return rhs(z, v)

        _, J = _fd_jac_point(f, np.asarray(y, dtype=float))
        lam, vl = np.linalg.eig(J.T)
        out = []
        if self.n_modes:
            key = lam.real if side == "left" else -lam.real
            order = np.argsort(key)[: self.n_modes]
            w = y - self._base(z, y)
            done = set()
            for i in order:
                if i in done:
                    continue
                l = vl[:, i] / vl[4, i]
                if abs(lam[i].imag) > 1e-12 * max(1.0, abs(lam[i])):
                    # a conjugate pair: real and imaginary parts are two conditions
                    partner = int(np.argmin(np.abs(lam - np.conj(lam[i]))))
                    done.add(partner)
                    out.extend([np.real(l @ w), np.imag(l @ w)])
                else:
                    out.append(np.real(l @ w))
                done.add(i)
            out = out[: self.n_modes]
        if self.level is not None:
            i = int(np.argmin(np.abs(lam)))
            l = np.real(vl[:, i] / vl[0, i])
            out.append(l @ y - self.level)
        return np.array(out, dtype=float)


# ---------------------------------------------------------------------------
# problem and solution


def make_mesh(a: float, b: float, n: int, cluster: str | None = "right", kappa: float = 3.0) -> np.ndarray:
    """``n`` nodes on [a, b], graded by a sinh map towards ``cluster``.

    ``cluster`` is ``right``, ``left``, ``center`` or ``None``. The map is
    smooth, so meshes with ``2n - 1`` nodes contain the ``n``-node mesh.
    """
    x = np.linspace(0.0, 1.0, n)
    if cluster is None or kappa == 0:
        return a + (b - a) * x
    if cluster == "right":
        return b - (b - a) * np.sinh(kappa * (1 - x)) / np.sinh(kappa)
    if cluster == "left":
        return a + (b - a) * np.sinh(kappa * x) / np.sinh(kappa)
    if cluster == "center":
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        return mid + half * np.sinh(kappa * (2 * x - 1)) / np.sinh(kappa)
    raise ValueError(f"unknown cluster {cluster!r}")


@dataclass
class BvpSpec:
    """Boundary-value problem on ``domain`` for a five-component system.

    ``rhs(z, Y)`` must accept ``z`` of shape (M,) and ``Y`` of shape (5, M).
    ``left`` and ``right`` are closures or :class:`Conditions`; together
    they must supply exactly five conditions.
    """

    rhs: Callable
    domain: tuple = (-100.0, 0.0)
    left: object = None
    right: object = None
    n: int = 2000
    cluster: str | None = "right"
    kappa: float = 3.0
    tol: float = 1e-4
    max_iter: int = 60
    max_halvings: int = 20
    kind: str = "Shock"
    params: SimilarityParams = field(default_factory=SimilarityParams)
    mesh: np.ndarray | None = None

    def __post_init__(self):
        a, b = self.domain
        if not b > a:
            raise ValueError("domain must be an increasing interval")
        if self.n < 64:
            raise ValueError("need at least 64 mesh nodes")
        if self.left is None or self.right is None:
            raise ValueError("both ends need boundary conditions")
        total = self.left.count + self.right.count
        if total != 5:
            raise ValueError(f"exactly 5 boundary conditions required, got {total}")
        if self.mesh is None:
            self.mesh = make_mesh(a, b, self.n, self.cluster, self.kappa)
        else:
            self.mesh = np.asarray(self.mesh, dtype=float)
            self.n = self.mesh.size


@dataclass
class BvpSolution:
    profile: Profile
    iterations: int
    residual: float
    condition: float
    boundary_residual: float = 0.0


def _guess_on_mesh(guess, mesh):
    if isinstance(guess, Profile):
        p = guess.ascending()
        return np.column_stack([np.interp(mesh, p.mesh, p.jets[:, k]) for k in range(5)])
    if callable(guess):
        Y = np.asarray(guess(mesh), dtype=float)
        return Y if Y.shape == (mesh.size, 5) else Y.T
    Y = np.asarray(guess, dtype=float)
    if Y.shape != (mesh.size, 5):
        raise ValueError("guess array must have shape (n, 5)")
    return Y.copy()


class _System:
    """Hermite-Simpson residual and its sparse Jacobian."""

    def __init__(self, spec: BvpSpec):
        self.spec = spec
        self.z = spec.mesh
        self.h = np.diff(self.z)
        self.zm = self.z[:-1] + 0.5 * self.h
        self.ml = spec.left.count
        self.n = self.z.size

    def _f(self, z, Y):
        return np.asarray(self.spec.rhs(z, Y.T), dtype=float).T

    def _f_and_jac(self, z, Y):
        F = self._f(z, Y)
        J = np.empty((z.size, 5, 5))
        for j in range(5):
            dy = _FD_REL * np.maximum(1.0, np.abs(Y[:, j]))
            Yp = Y.copy()
            Yp[:, j] += dy
            J[:, :, j] = (self._f(z, Yp) - F) / dy[:, None]
        return F, J

    def _bc(self, Y):
        s = self.spec
        left = s.left.residual(self.z[0], Y[0], s.rhs, "left")
        right = s.right.residual(self.z[-1], Y[-1], s.rhs, "right")
        return left, right

    def residual(self, Y, with_jac=False):
        h = self.h[:, None]
        if with_jac:
            F, J = self._f_and_jac(self.z, Y)
        else:
            F = self._f(self.z, Y)
        Ym = 0.5 * (Y[:-1] + Y[1:]) + h / 8 * (F[:-1] - F[1:])
        if with_jac:
            Fm, Jm = self._f_and_jac(self.zm, Ym)
        else:
            Fm = self._f(self.zm, Ym)
        R = Y[1:] - Y[:-1] - h / 6 * (F[:-1] + 4 * Fm + F[1:])
        left, right = self._bc(Y)
        vec = np.concatenate([left, R.ravel(), right])
        if not with_jac:
            return vec
        return vec, self._jacobian(Y, J, Jm)

    def _jacobian(self, Y, J, Jm):
        n, ml = self.n, self.ml
        h = self.h[:, None, None]
        eye = np.eye(5)[None]
        Ji, Jn = J[:-1], J[1:]
        A = -eye - h / 6 * (Ji + 4 * Jm @ (0.5 * eye + h / 8 * Ji))
        B = eye - h / 6 * (Jn + 4 * Jm @ (0.5 * eye - h / 8 * Jn))
        s = self.spec
        _, JL = _fd_jac_point(lambda v: s.left.residual(self.z[0], v, s.rhs, "left"), Y[0].copy())
        _, JR = _fd_jac_point(lambda v: s.right.residual(self.z[-1], v, s.rhs, "right"), Y[-1].copy())
        rows, cols, vals = [], [], []
        # left conditions act on node 0
        r, c = np.meshgrid(np.arange(ml), np.arange(5), indexing="ij")
        rows.append(r.ravel()), cols.append(c.ravel()), vals.append(JL.ravel())
        # interval i: rows ml + 5i .. , columns of nodes i and i + 1
        i = np.arange(n - 1)[:, None, None]
        rr = ml + 5 * i + np.arange(5)[None, :, None]
        cc = 5 * i + np.arange(5)[None, None, :]
        rr, cc = np.broadcast_arrays(rr, cc)
        rows += [rr.ravel(), rr.ravel()]
        cols += [cc.ravel(), (cc + 5).ravel()]
        vals += [A.ravel(), B.ravel()]
        mr = 5 - ml
        r, c = np.meshgrid(ml + 5 * (n - 1) + np.arange(mr), 5 * (n - 1) + np.arange(5), indexing="ij")
        rows.append(r.ravel()), cols.append(c.ravel()), vals.append(JR.ravel())
        size = 5 * n
        return sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size))


def _condition_estimate(jac, lu) -> float:
    n = jac.shape[0]
    inv = LinearOperator(
        (n, n),
        matvec=lambda v: lu.solve(np.asarray(v, dtype=float).ravel()),
        rmatvec=lambda v: lu.solve(np.asarray(v, dtype=float).ravel(), trans="T"),
        dtype=float,
    )
    try:
        return float(onenormest(jac) * onenormest(inv))
    except Exception:  # pragma: no cover - estimate only
        return float("nan")


def solve_bvp(spec: BvpSpec, guess, newton_tol: float | None = None, provenance: dict | None = None) -> BvpSolution:
    """Damped Newton on the collocation equations.

    Newton runs until the max-norm residual falls below ``newton_tol``
    (default ``min(1e-10, spec.tol * 1e-6)``) or stalls; the solve is
    accepted when that residual is below ``10 * spec.tol``.
    """
    system = _System(spec)
    Y = _guess_on_mesh(guess, spec.mesh)
    target = newton_tol if newton_tol is not None else min(1e-10, spec.tol * 1e-6)
    it = 0
    vec, jac = system.residual(Y, with_jac=True)
    phi = 0.5 * vec @ vec
    lu = None
    while True:
        norm = np.max(np.abs(vec))
        if norm < target or it >= spec.max_iter:
            break
        try:
            lu = splu(jac)
        except RuntimeError as exc:
            raise SingularJacobian(str(exc)) from exc
        step = lu.solve(-vec).reshape(Y.shape)
        if not np.all(np.isfinite(step)):
            raise SingularJacobian("non-finite Newton step")
        lam, accepted = 1.0, False
        for _ in range(spec.max_halvings):
            Y_try = Y + lam * step
            with np.errstate(all="ignore"):
                v_try = system.residual(Y_try)
            if np.all(np.isfinite(v_try)):
                phi_try = 0.5 * v_try @ v_try
                if phi_try <= (1 - 2e-4 * lam) * phi:
                    accepted = True
                    break
            lam *= 0.5
        it += 1
        if not accepted:
            # stalled at rounding level is fine; otherwise a genuine divergence
            if norm < 10 * spec.tol:
                break
            raise NewtonDiverged(f"step rejected {spec.max_halvings} times (residual {norm:.3g})")
        Y = Y_try
        vec, jac = system.residual(Y, with_jac=True)
        phi = 0.5 * vec @ vec
    ml = system.ml
    colloc = np.max(np.abs(vec[ml : ml + 5 * (system.n - 1)]))
    bc = max(np.max(np.abs(vec[:ml]), initial=0.0), np.max(np.abs(vec[ml + 5 * (system.n - 1) :]), initial=0.0))
    if colloc >= 10 * spec.tol or bc >= 10 * spec.tol or not np.all(np.isfinite(Y)):
        raise NewtonDiverged(f"no convergence after {it} iterations (residual {max(colloc, bc):.3g})")
    if lu is None:
        lu = splu(jac)
    cond = _condition_estimate(jac, lu)
    prov = {"method": "collocation", "scheme": "Hermite-Simpson", "n": system.n, "domain": list(spec.domain), "tol": spec.tol}
    prov.update(provenance or {})
    prof = Profile(spec.kind, spec.params, spec.mesh.copy(), Y, prov)
    return BvpSolution(prof, it, float(colloc), cond, float(bc))


def continuation(make_spec: Callable, path, guess) -> list:
    """Natural-parameter continuation: each solution seeds the next solve.

    ``make_spec(value)`` builds the :class:`BvpSpec` for one path entry.
    The chain stops at the first failure and the partial list is returned.
    """
    out = []
    current = guess
    for value in path:
        try:
            sol = solve_bvp(make_spec(value), current, provenance={"continuation_value": value})
        except (NewtonDiverged, SingularJacobian, ValueError, FloatingPointError):
            break
        out.append(sol)
        current = sol.profile
    return out


# ---------------------------------------------------------------------------
# problem builders


def _prepend_series(prof: Profile, series, z_init, extra: dict) -> Profile:
    zs = np.linspace(-z_init, 0.0, 9)[1:]
    jets = np.array([series(z) for z in zs])
    prov = dict(prof.provenance)
    prov.update(extra)
    return Profile(
        prof.kind,
        prof.params,
        np.concatenate([prof.mesh, zs]),
        np.concatenate([prof.jets, jets]),
        prov,
        prof.rarefaction,
    )


def polish_shock(
    shoot,
    L: float = 100.0,
    n: int = 2000,
    tol: float = 1e-4,
    nu: float | None = None,
    kappa: float = 3.0,
) -> BvpSolution:
    """Re-solve a shot shock profile on [-L, -z_init] with a damped far field.

    ``shoot`` is a :class:`shooting.ShootResult`. Four conditions keep the
    end state on the origin series (C fixed, D free); the fifth removes the
    mode growing towards -L. The returned profile includes the series on
    [-z_init, 0] and records the recovered D.
    """
    prof = shoot.profile
    prov = prof.provenance
    kind = NdeKind.parse(prof.kind)
    C, z_init = prov["C"], prov["z_init"]
    nu = prov["nu"] if nu is None else nu
    order = prov.get("series_order", 7)

    def series(D):
        return series_origin(kind, C, D, order)(-z_init)

    right = SeriesConditions(series, shoot.value)
    spec = BvpSpec(
        rhs_shock(kind, nu),
        (-L, -z_init),
        OscillatoryDamped(1),
        right,
        n=n,
        kappa=kappa,
        tol=tol,
        kind=kind.value,
    )
    G = float(np.mean(prof.g[(prof.mesh < 0.6 * prof.mesh.min())]))
    lo = prof.mesh.min()

    def guess(z):
        Y = np.tile([G, 0, 0, 0, 0], (z.size, 1)).astype(float)
        inside = z >= lo
        p = prof.ascending()
        for k in range(5):
            Y[inside, k] = np.interp(z[inside], p.mesh, p.jets[:, k])
        # blend the shot profile into the level over a few units
        w = np.clip((z - lo) / 3.0, 0.0, 1.0)
        Y[:, 1:] *= w[:, None]
        Y[:, 0] = w * Y[:, 0] + (1 - w) * G
        return Y

    sol = solve_bvp(spec, guess, provenance={"nu": nu, "C": C, "z_init": z_init, "closure": "OscillatoryDamped"})
    D = right.parameter(sol.profile.jets[-1])
    full = _prepend_series(
        sol.profile,
        series_origin(kind, C, D, order),
        z_init,
        {"D": D, "D_shooting": shoot.value, "far_field": float(_level(sol.profile))},
    )
    sol.profile = full
    return sol


def _level(prof: Profile) -> float:
    """Far-field level from the slow-mode combination g - g4 / c at the left end."""
    z, y = prof.mesh[0], prof.jets[0]
    c = -z / (5 * y[0])
    return y[0] - y[4] / c


def solve_global(
    p: SimilarityParams,
    F0: float,
    F1: float = 0.0,
    L: float = 100.0,
    n: int = 1000,
    tol: float = 1e-4,
    nu: float = DEFAULT_NU,
    kappa: float = 2.0,
    guess=None,
) -> BvpSolution:
    """Global (post-blow-up) profile with ``F(0) = F0``, ``F'(0) = F1`` and the tail ``C0 |y|^(alpha/beta)``."""
    e = p.tail_exponent
    spec = BvpSpec(
        rhs_global(p, nu),
        (-L, 0.0),
        AlgebraicTail(p.c0, e),
        Conditions.fixed({0: F0, 1: F1}),
        n=n,
        kappa=kappa,
        tol=tol,
        kind="Global",
        params=p,
    )
    if guess is None:

        def guess(z):
            r = -z
            # smooth blend of the far-field tail with F(0) = F0, F'(0) = F1
            base = (p.c0 ** (2 / e) * r ** 2 + abs(F0) ** (2 / e)) ** (e / 2) if e > 0 else np.full_like(r, F0)
            corr = F1 * z * np.exp(-r)
            G = base + corr
            out = [G]
            d = G
            for _ in range(4):
                d = np.gradient(d, z, edge_order=2)
                out.append(d)
            return np.column_stack(out)

    return solve_bvp(spec, guess, provenance={"F0": F0, "F1": F1, "nu": nu, "closure": "AlgebraicTail"})


def blowup_profile(
    p: SimilarityParams,
    guess,
    f1: float = -1.0,
    L: float = 100.0,
    n: int = 2000,
    tol: float = 1e-4,
    nu: float = DEFAULT_NU,
    y_init: float = 1e-2,
    f3_guess: float = 0.07,
    kappa: float = 3.0,
) -> BvpSolution:
    """Blow-up profile on [-L, 0]: odd series at the origin, damped algebraic tail at -L."""
    from .shooting import blowup_series

    spec = _blowup_spec(p, f1, L, n, tol, nu, y_init, f3_guess, kappa)
    sol = solve_bvp(spec, guess, provenance={"f1": f1, "nu": nu, "closure": "OscillatoryDamped"})
    return _finish_blowup(sol, spec, p, f1, y_init)


def _blowup_spec(p, f1, L, n, tol, nu, y_init, f3_guess, kappa):
    from .shooting import blowup_series

    def series(f3):
        return blowup_series(p, f1, f3)(-y_init)

    return BvpSpec(
        rhs_blowup(p, nu),
        (-L, -y_init),
        OscillatoryDamped(1, base_exponent=p.tail_exponent),
        SeriesConditions(series, f3_guess),
        n=n,
        kappa=kappa,
        tol=tol,
        kind="Blowup",
        params=p,
    )


def _finish_blowup(sol, spec, p, f1, y_init):
    from .shooting import blowup_series

    f3 = spec.right.parameter(sol.profile.jets[-1])
    sol.profile = _prepend_series(sol.profile, blowup_series(p, f1, f3), y_init, {"f3": f3, "alpha": p.alpha})
    return sol


def blowup_continuation(alphas, guess, f1=-1.0, L=100.0, n=2000, tol=1e-4, nu=DEFAULT_NU, y_init=1e-2) -> list:
    """Continue blow-up profiles along a path of alpha values."""
    out = []
    current = guess
    f3 = 0.07
    for a in alphas:
        p = SimilarityParams(a)
        spec = _blowup_spec(p, f1, L, n, tol, nu, y_init, f3, 3.0)
        try:
            sol = solve_bvp(spec, current, provenance={"f1": f1, "nu": nu, "continuation_value": a})
        except (NewtonDiverged, SingularJacobian, ValueError):
            break
        sol = _finish_blowup(sol, spec, p, f1, y_init)
        f3 = sol.profile.provenance["f3"]
        out.append(sol)
        current = sol.profile
    return out


def uniform_profile(kind, L: float = 60.0, n: int = 3000, tol: float = 1e-4, kappa: float = 0.0) -> BvpSolution:
    """Shock profile of a uniformly dispersive NDE on the whole line [-L, L].

    These ODEs are not odd-symmetric, so the profile is solved on a
    symmetric interval: at each end the outward-growing modes are removed
    and the far-field level is set to +1 (left) and -1 (right).
    """
    kind = NdeKind.parse(kind)
    if kind not in (NdeKind.UniformDiv, NdeKind.UniformNonDiv):
        raise ValueError("uniform_profile handles UniformDiv and UniformNonDiv")
    spec = BvpSpec(
        rhs_shock(kind, 0.0),
        (-L, L),
        OscillatoryDamped(1, level=1.0),
        OscillatoryDamped(2, level=-1.0),
        n=n,
        cluster="center" if kappa else None,
        kappa=kappa,
        tol=tol,
        kind=kind.value,
    )

    def guess(z):
        g = -np.tanh(z / 2)
        out = [g]
        d = g
        for _ in range(4):
            d = np.gradient(d, z, edge_order=2)
            out.append(d)
        return np.column_stack(out)

    return solve_bvp(spec, guess, provenance={"closure": "OscillatoryDamped both ends", "levels": [1.0, -1.0]})
