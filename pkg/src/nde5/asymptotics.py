"""Characteristic polynomials of the asymptotic bundles, and tail fitting."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy.optimize import least_squares

from .errors import FitDiverged
from .models import NdeKind, Profile, SimilarityParams

__all__ = [
    "poly_roots",
    "sturm_count",
    "BundleReport",
    "CONTEXTS",
    "char_exponents",
    "InterfaceTerm",
    "interface_expansion",
    "TailFit",
    "fit_oscillatory_tail",
    "equilibrium_frequency",
]


def poly_roots(coeffs, cluster_tol: float = 1e-7) -> np.ndarray:
    """All complex roots of ``coeffs[0] x^n + ... + coeffs[n]``.

    Eigenvalues of the companion matrix. Clusters that behave as a multiple
    root (or lie within ``cluster_tol``, relative) are merged at their mean;
    simple roots are polished by a few Newton steps.
    """
    c = np.asarray(coeffs, dtype=complex)
    c = np.trim_zeros(c, "f")
    if c.size == 0 or c[0] == 0:
        raise ValueError("leading coefficient must be nonzero")
    n = c.size - 1
    if n == 0:
        return np.empty(0, dtype=complex)
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -c[1:] / c[0]
    comp[1:, :-1] = np.eye(n - 1)
    roots = np.linalg.eigvals(comp)
    # merge clusters: a root of multiplicity m comes out split by ~eps^(1/m),
    # so nearby roots are merged when the polynomial and its first m - 1
    # derivatives all vanish (relative to their size) at the cluster mean
    out = roots.copy()
    mult = np.ones(n, dtype=int)
    used = np.zeros(n, dtype=bool)
    for i in np.argsort(np.abs(roots)):
        if used[i]:
            continue
        scale = max(1.0, abs(roots[i]))
        near = [j for j in range(n) if not used[j] and abs(roots[j] - roots[i]) < 1e-2 * scale]
        near.sort(key=lambda j: abs(roots[j] - roots[i]))
        members = [i]
        for m in range(len(near), 1, -1):
            mean = np.mean(roots[near[:m]])
            if _is_multiple(c, mean, m) or max(abs(roots[j] - roots[i]) for j in near[:m]) < cluster_tol * scale:
                members = near[:m]
                break
        mean = np.mean(roots[members])
        for j in members:
            out[j] = mean
            mult[j] = len(members)
            used[j] = True
    # Newton polish of the simple roots
    dc = np.polyder(c)
    for i in range(n):
        if mult[i] > 1:
            continue
        r = out[i]
        for _ in range(4):
            d = np.polyval(dc, r)
            if d == 0:
                break
            step = np.polyval(c, r) / d
            if not np.isfinite(step) or abs(step) > 1e-3 * max(1.0, abs(r)):
                break
            r = r - step
        out[i] = r
    # clean tiny imaginary / real parts
    re, im = out.real.copy(), out.imag.copy()
    mag = np.maximum(1.0, np.abs(out))
    im[np.abs(im) < 1e-13 * mag] = 0.0
    re[np.abs(re) < 1e-13 * mag] = 0.0
    out = re + 1j * im
    return out[np.lexsort((out.imag, out.real))]


def _is_multiple(c, x, m, rtol=1e-10):
    """True if ``x`` is (numerically) a root of multiplicity ``m``."""
    d = np.asarray(c, dtype=complex)
    for _ in range(m):
        size = np.polyval(np.abs(d), abs(x))
        if abs(np.polyval(d, x)) > rtol * max(size, 1e-300):
            return False
        d = np.polyder(d)
    return True


def _sturm_chain(p):
    chain = [np.trim_zeros(np.asarray(p, dtype=float), "f")]
    chain.append(np.polyder(chain[0]))
    while chain[-1].size > 1:
        _, r = np.polydiv(chain[-2], chain[-1])
        r = np.trim_zeros(r, "f")
        scale = np.max(np.abs(chain[-2]))
        if r.size == 0 or np.max(np.abs(r)) < 1e-14 * scale:
            break
        chain.append(-r)
    return chain


def _sign_changes(values):
    s = [np.sign(v) for v in values if v != 0]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _chain_at(chain, x):
    if np.isinf(x):
        # sign of the leading term at +/- infinity
        return [c[0] * (np.sign(x) ** (c.size - 1)) for c in chain]
    return [np.polyval(c, x) for c in chain]


def sturm_count(coeffs, a: float, b: float) -> int:
    """Number of distinct real roots in (a, b] by Sturm's theorem."""
    chain = _sturm_chain(coeffs)
    return _sign_changes(_chain_at(chain, a)) - _sign_changes(_chain_at(chain, b))


@dataclass
class BundleReport:
    context: str
    coefficients: list
    roots: np.ndarray
    admissible: str
    admissible_count: int
    bundle_dimension: int
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "context": self.context,
            "coefficients": [_cplx(c) for c in self.coefficients],
            "roots": [[float(r.real), float(r.imag)] for r in self.roots],
            "admissible": self.admissible,
            "admissible_count": self.admissible_count,
            "bundle_dimension": self.bundle_dimension,
            "extras": self.extras,
        }


def _cplx(c):
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


CONTEXTS = (
    "WkbjEquilibrium",
    "WkbjBlowupTail",
    "WkbjGlobalTail",
    "QuinticGrowthEuler",
    "QuinticGrowthShock",
    "VanishingSqrt",
    "CompactonInterface",
)


def equilibrium_frequency(level: float = 1.0) -> float:
    """Phase coefficient a0 of the oscillation about the equilibrium ``level``.

    From ``a^4 = 4^4 / (5^5 level)``; a0 = 4 * 5**(-5/4) for level 1.
    """
    return (4.0**4 / (5.0**5 * level)) ** 0.25


def _falling(k):
    """Coefficients of m (m-1) ... (m-k+1) as a polynomial in m."""
    p = np.array([1.0])
    for j in range(k):
        p = np.polymul(p, [1.0, -j])
    return p


def _rising_shift(k, start):
    """(m + start)(m + start + 1) ... (m + start + k - 1)."""
    p = np.array([1.0])
    for j in range(k):
        p = np.polymul(p, [1.0, start + j])
    return p


def char_exponents(context: str, p: SimilarityParams | None = None, tol: float = 1e-9) -> BundleReport:
    """Roots of the characteristic equation of one asymptotic bundle.

    ``bundle_dimension`` counts admissible roots plus the free parameters
    of that context (amplitude ``C0``, interface position ``y0``).
    """
    p = p or SimilarityParams(0.0)
    if context == "WkbjEquilibrium":
        coeffs = [1.0, 0, 0, 0, -(4.0**4) / 5.0**5]
        roots = poly_roots(coeffs)
        imag = [r for r in roots if abs(r.real) <= tol * max(1, abs(r))]
        a0 = float(max(abs(r.imag) for r in imag))
        return BundleReport(
            context,
            coeffs,
            roots,
            "Re a = 0 (bounded oscillation about the equilibrium)",
            len(imag),
            len(imag),
            {"a0": a0, "envelope_exponent": -5 / 8, "phase_exponent": 5 / 4},
        )
    if context in ("WkbjBlowupTail", "WkbjGlobalTail"):
        gamma = 1.0 + 0.25 * (1.0 - p.tail_exponent)
        sign = 1.0 if context == "WkbjBlowupTail" else -1.0
        coeffs = [p.c0 * gamma**4, 0, 0, 0, -sign * p.beta]
        roots = poly_roots(coeffs)
        adm = [r for r in roots if r.real <= tol * max(1.0, abs(r))]
        return BundleReport(
            context,
            coeffs,
            roots,
            "Re a <= 0",
            len(adm),
            len(adm) + 1,
            {"gamma": gamma},
        )
    if context in ("QuinticGrowthEuler", "QuinticGrowthShock"):
        if context == "QuinticGrowthEuler":
            # h(m) = (m+1)...(m+5)/15120 - beta m + alpha
            coeffs = list(_rising_shift(5, 1) / 15120.0 + np.array([0, 0, 0, 0, -p.beta, p.alpha]))
            base = 5.0
        else:
            # linearised growing bundle Y = |z|^m about -z^5/120:
            # (m-1)(m-2)(m-3)(m-4) - 24 = m (m - 5)(m^2 - 5m + 10)
            coeffs = list(_rising_shift(4, -4) - np.array([0, 0, 0, 0, 24.0]))
            base = 5.0
        roots = poly_roots(coeffs)
        neg = sturm_count(coeffs, -np.inf, 0.0) - (1 if abs(np.polyval(coeffs, 0.0)) < 1e-14 else 0)
        adm = [r for r in roots if r.real <= base + tol]
        return BundleReport(
            context,
            coeffs,
            roots,
            "Re m <= 5 (perturbation not faster than the quintic base solution)",
            len(adm),
            len(adm),
            {"negative_real_roots": int(neg), "h_at_minus5": float(np.polyval(coeffs, -5.0))},
        )
    if context == "VanishingSqrt":
        exps = [1.5, 2.5, 3.5]
        return BundleReport(
            context,
            [],
            np.array(exps, dtype=complex),
            "exponents of |y - y0|^m from -A^2 (sqrt|y-y0| Y)^(5) = 0 above the base 1/2",
            len(exps),
            len(exps) + 1,
            {"free_parameters": ["y0"]},
        )
    if context == "CompactonInterface":
        coeffs = list(_falling(4) - np.array([0, 0, 0, 0, 840.0]))
        roots = poly_roots(coeffs)
        adm = [r for r in roots if r.real > 8 + tol]
        return BundleReport(
            context,
            coeffs,
            roots,
            "Re m > 8 (perturbation o((y0 - y)^8))",
            len(adm),
            len(adm) + 1,
            {"free_parameters": ["y0"]},
        )
    raise ValueError(f"unknown context {context!r}")


@dataclass(frozen=True)
class InterfaceTerm:
    """Leading term ``coefficient * (z0 - z)^power * |ln(z0 - z)|^log_power``."""

    kind: str
    coefficient: float
    power: int
    log_power: int
    balance_residual: float

    def __call__(self, z, z0):
        r = z0 - np.asarray(z, dtype=float)
        return self.coefficient * r**self.power * np.abs(np.log(r)) ** self.log_power


def interface_expansion(kind, z0: float = 0.0) -> InterfaceTerm:
    """Leading behaviour at a finite right interface, from a two-term balance.

    * N14: g = K r^4 (r = z0 - z) in (g g')'''' = -g' z / 5
    * N50: g = K r^4 |ln r| in g g5 = -g' z / 5 (leading log terms)
    * CompactonQuintic: F = c r^8 in F'''' = 2 sqrt(F)
    """
    name = getattr(kind, "value", kind)
    if name == NdeKind.N14.value:
        # g g' = -4 K^2 r^7 ; d^4/dz^4 = d^4/dr^4 -> -4K^2 * 7*6*5*4 r^3
        quad = -4.0 * 7 * 6 * 5 * 4  # times K^2
        # -g' z / 5 with g' = -4 K r^3 and z ~ z0  ->  (4/5) K z0 r^3
        lin = 4.0 / 5.0 * z0  # times K
        K = lin / quad
        res = quad * K**2 - lin * K
        return InterfaceTerm(name, K, 4, 0, abs(res))
    if name == NdeKind.N50.value:
        # g = -K r^4 ln r ; d^5/dr^5 (r^4 ln r) = 24 / r ; g5 (in z) = 24 K / r
        # g g5 = -24 K^2 r^3 ln r ; -g' z/5 ~ -(1/5) (4 K r^3 ln r) z0
        quad = -float(factorial(4))  # times K^2, per r^3 ln r
        lin = -4.0 / 5.0 * z0  # times K
        K = lin / quad
        res = quad * K**2 - lin * K
        return InterfaceTerm(name, K, 4, 1, abs(res))
    if name == "CompactonQuintic":
        # c * 8*7*6*5 = 2 sqrt(c)  ->  sqrt(c) = 2 / 1680
        fall = 8 * 7 * 6 * 5
        root_c = 2.0 / fall
        c = root_c**2
        res = c * fall - 2.0 * np.sqrt(c)
        return InterfaceTerm(name, c, 8, 0, abs(res))
    raise ValueError(f"no interface expansion for {name!r}")


@dataclass(frozen=True)
class TailFit:
    envelope_exponent: float
    phase_exponent: float
    a0: float
    A: float
    B: float
    residual: float

    @property
    def amplitude_sq(self) -> float:
        return self.A**2 + self.B**2

    def model(self, z, level: float = 1.0):
        r = np.abs(np.asarray(z, dtype=float))
        ph = self.a0 * r**self.phase_exponent
        return level + r**self.envelope_exponent * (self.A * np.sin(ph) + self.B * np.cos(ph))

    def to_dict(self):
        return {
            "envelope_exponent": self.envelope_exponent,
            "phase_exponent": self.phase_exponent,
            "a0": self.a0,
            "A": self.A,
            "B": self.B,
            "A2_plus_B2": self.amplitude_sq,
            "residual": self.residual,
        }


def _linear_amplitudes(r, y, p, q, a0):
    ph = a0 * r**q
    env = r**p
    M = np.column_stack([env * np.sin(ph), env * np.cos(ph)])
    coef, *_ = np.linalg.lstsq(M, y, rcond=None)
    return coef, M @ coef - y


def fit_oscillatory_tail(prof: Profile, window, level: float = 1.0) -> TailFit:
    """Fit ``g - level ~ |z|^p [A sin(a0 |z|^q) + B cos(a0 |z|^q)]`` on ``window``.

    Variable projection: (p, q, a0) by nonlinear least squares, (A, B)
    linearly. The phase coefficient is seeded from the zero crossings.
    """
    za, zb = sorted(window)
    mask = (prof.mesh >= za) & (prof.mesh <= zb)
    if mask.sum() < 20:
        raise ValueError("window holds too few mesh points")
    z = prof.mesh[mask]
    r = np.abs(z)
    if r.min() < 1.0:
        raise ValueError("window must stay away from the origin")
    y = prof.jets[mask, 0] - level
    if np.max(np.abs(y)) < 1e-13:
        raise FitDiverged("no oscillation about the level: profile is constant")

    q0 = 1.25
    order = np.argsort(r)
    rs, ys = r[order], y[order]
    s = np.sign(ys)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    if idx.size >= 3:
        # linear interpolation of the crossings, then phase = pi * count
        rc = rs[idx] - ys[idx] * (rs[idx + 1] - rs[idx]) / (ys[idx + 1] - ys[idx])
        slope = np.polyfit(rc**q0, np.pi * np.arange(rc.size), 1)[0]
        a_init = abs(slope)
    else:
        a_init = equilibrium_frequency(level)
    x0 = np.array([-0.625, q0, a_init])
    scale = np.sqrt(np.mean(y**2))

    def fun(x):
        _, res = _linear_amplitudes(r, y, *x)
        return res / scale

    try:
        sol = least_squares(
            fun, x0, bounds=([-5.0, 0.5, 1e-3], [5.0, 3.0, 10.0]), x_scale=[0.1, 0.05, 0.05],
            xtol=1e-13, ftol=1e-13, gtol=1e-13, max_nfev=2000,
        )
    except (ValueError, np.linalg.LinAlgError) as exc:  # pragma: no cover - defensive
        raise FitDiverged(str(exc)) from exc
    if not sol.success or not np.all(np.isfinite(sol.x)):
        raise FitDiverged(sol.message)
    p, q, a0 = sol.x
    (A, B), res = _linear_amplitudes(r, y, p, q, a0)
    rel = float(np.sqrt(np.mean(res**2)) / scale)
    if rel > 0.5:
        raise FitDiverged(f"relative fit residual {rel:.3g} too large")
    return TailFit(float(p), float(q), float(a0), float(A), float(B), rel)
