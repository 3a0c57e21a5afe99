"""Right-hand sides, origin series and profile transforms.

Every similarity ODE of the fifth-order NDEs is kept as a first-order
system in the jet ``(g, g', g'', g''', g'''')``; the top derivative is
isolated by expanding the quadratic operators with the Leibniz rule.
Division by the degenerate coefficient ``g`` is regularised as

    1/g  ->  sign(g) / sqrt(nu**2 + g**2)

with ``nu = 1e-4`` by default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from math import comb
from pathlib import Path

import numpy as np

__all__ = [
    "NdeKind",
    "SimilarityParams",
    "Profile",
    "DEFAULT_NU",
    "reg_inverse",
    "rhs_shock",
    "rhs_blowup",
    "rhs_global",
    "rhs_phase_plane",
    "series_origin",
    "OriginSeries",
    "rescale",
    "reflect_to_rarefaction",
    "operator_residual",
    "parse_number",
]

DEFAULT_NU = 1e-4


class NdeKind(str, Enum):
    N50 = "N50"
    N41 = "N41"
    N32 = "N32"
    N23 = "N23"
    N14 = "N14"
    UniformDiv = "UniformDiv"
    UniformNonDiv = "UniformNonDiv"
    Time5 = "Time5"

    @classmethod
    def parse(cls, name) -> "NdeKind":
        if isinstance(name, cls):
            return name
        key = str(name).replace("-", "").replace("_", "").lower()
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise ValueError(f"unknown NDE kind {name!r}")


DEGENERATE_KINDS = (NdeKind.N50, NdeKind.N41, NdeKind.N32, NdeKind.N23, NdeKind.N14)
UNIFORM_KINDS = (NdeKind.UniformDiv, NdeKind.UniformNonDiv)


def parse_number(text) -> float:
    """Parse ``"1/9"``, ``"0.25"`` or a number exactly, then round once."""
    if isinstance(text, (int, float, Fraction)):
        return float(text)
    return float(Fraction(str(text).strip()))


@dataclass(frozen=True)
class SimilarityParams:
    """Exponents of the blow-up/global similarity ODEs.

    ``beta`` is always derived as ``(1 + alpha) / 5``; ``c0`` is the
    far-field amplitude of the algebraic tail ``c0 |y|**(alpha/beta)``.
    """

    alpha: float = 0.0
    c0: float = 1.0
    beta: float = field(init=False)

    def __post_init__(self):
        a = Fraction(self.alpha) if isinstance(self.alpha, Fraction) else None
        alpha = float(self.alpha)
        if not np.isfinite(alpha) or not np.isfinite(self.c0):
            raise ValueError("alpha and c0 must be finite")
        beta = float((1 + a) / 5) if a is not None else (1.0 + alpha) / 5.0
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "beta", beta)

    @property
    def tail_exponent(self) -> float:
        """alpha / beta = 5 alpha / (1 + alpha)."""
        return 5.0 * self.alpha / (1.0 + self.alpha)

    def to_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "c0": self.c0}


@dataclass(frozen=True, eq=False)
class Profile:
    """A computed profile: mesh, jets (value and four derivatives) and metadata.

    ``kind`` is an :class:`NdeKind` value or one of the family tags
    ``Shock``, ``Blowup``, ``Global``, ``PhasePlane``, ``Compacton``.
    """

    kind: str
    params: SimilarityParams
    mesh: np.ndarray
    jets: np.ndarray
    provenance: dict
    rarefaction: bool = False

    def __post_init__(self):
        mesh = np.asarray(self.mesh, dtype=float)
        jets = np.asarray(self.jets, dtype=float)
        if jets.ndim != 2 or jets.shape != (mesh.size, 5):
            raise ValueError("jets must have shape (len(mesh), 5)")
        d = np.diff(mesh)
        if mesh.size > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("mesh must be strictly monotone")
        if not np.all(np.isfinite(jets)):
            raise ValueError("jets must be finite")
        if not self.provenance:
            raise ValueError("provenance must not be empty")
        object.__setattr__(self, "mesh", mesh)
        object.__setattr__(self, "jets", jets)
        object.__setattr__(self, "kind", str(getattr(self.kind, "value", self.kind)))

    @property
    def g(self) -> np.ndarray:
        return self.jets[:, 0]

    def ascending(self) -> "Profile":
        """Same profile with the mesh sorted increasingly."""
        if self.mesh.size < 2 or self.mesh[1] > self.mesh[0]:
            return self
        return replace(self, mesh=self.mesh[::-1].copy(), jets=self.jets[::-1].copy())

    def __call__(self, z, order: int = 0):
        """Piecewise quintic Hermite-style evaluation using the stored jets."""
        p = self.ascending()
        zq = np.asarray(z, dtype=float)
        zz = np.atleast_1d(zq)
        i = np.clip(np.searchsorted(p.mesh, zz) - 1, 0, p.mesh.size - 2)
        left = np.abs(zz - p.mesh[i]) <= np.abs(p.mesh[i + 1] - zz)
        j = np.where(left, i, i + 1)
        dz = zz - p.mesh[j]
        out = np.zeros_like(zz)
        # Taylor polynomial from the nearest node, truncated at the 4th derivative
        for k in range(order, 5):
            out += p.jets[j, k] * dz ** (k - order) / _fact(k - order)
        return out if zq.ndim else float(out[0])

    # -- serialisation -------------------------------------------------
    def to_csv(self, path) -> Path:
        path = Path(path)
        rows = ["z,g,g1,g2,g3,g4"]
        for z, jet in zip(self.mesh, self.jets):
            rows.append(",".join(f"{v:.16g}" for v in (z, *jet)))
        path.write_text("\n".join(rows) + "\n")
        return path

    def metadata(self) -> dict:
        return {
            "kind": self.kind,
            "rarefaction": self.rarefaction,
            "params": self.params.to_dict(),
            "provenance": _jsonable(self.provenance),
        }

    def save(self, stem) -> tuple[Path, Path]:
        """Write ``<stem>.csv`` and the ``<stem>.json`` sidecar."""
        stem = Path(stem)
        csv_path = self.to_csv(stem.with_suffix(".csv"))
        json_path = stem.with_suffix(".json")
        json_path.write_text(json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n")
        return csv_path, json_path

    @classmethod
    def load(cls, path) -> "Profile":
        """Read a profile CSV (and its JSON sidecar when present)."""
        path = Path(path)
        if path.suffix != ".csv":
            path = path.with_suffix(".csv")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        side = path.with_suffix(".json")
        meta = json.loads(side.read_text()) if side.exists() else {}
        params = meta.get("params", {})
        return cls(
            kind=meta.get("kind", "Shock"),
            params=SimilarityParams(params.get("alpha", 0.0), params.get("c0", 1.0)),
            mesh=data[:, 0],
            jets=data[:, 1:6],
            provenance=meta.get("provenance") or {"source": str(path)},
            rarefaction=bool(meta.get("rarefaction", False)),
        )


def _fact(k):
    return (1, 1, 2, 6, 24, 120)[k]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Enum):
        return obj.value
    return obj


def reg_inverse(g, nu):
    """Regularised reciprocal ``sign(g)/sqrt(nu^2 + g^2)``; ``nu = 0`` gives 1/g."""
    if nu == 0:
        return 1.0 / g
    return np.sign(g) / np.sqrt(nu * nu + g * g)


# ---------------------------------------------------------------------------
# shock-family right-hand sides


def _leibniz_rest(kind: NdeKind, g0, g1, g2, g3, g4):
    """Terms of the quadratic operator other than ``g * g5`` (degenerate kinds)."""
    if kind is NdeKind.N50:
        return 0.0
    if kind is NdeKind.N41:
        return g1 * g4
    if kind is NdeKind.N32:
        return 2 * g1 * g4 + g2 * g3
    if kind is NdeKind.N23:
        return 3 * g1 * g4 + 4 * g2 * g3
    if kind is NdeKind.N14:
        return 5 * g1 * g4 + 10 * g2 * g3
    raise ValueError(kind)


def _uniform_div_rest(y):
    """``((1+g^2) g')'''' - (1+g^2) g5``, i.e. everything but the top term."""
    # derivatives of g^2 up to order 4
    sq = [sum(comb(k, j) * y[j] * y[k - j] for j in range(k + 1)) for k in range(5)]
    # (g^2 g')'''' without the k = 0 term g^2 g5
    return sum(comb(4, k) * sq[k] * y[5 - k] for k in range(1, 5))


def rhs_shock(kind, nu: float = DEFAULT_NU, rarefaction: bool = False):
    """First-order system for the shock-profile ODE of ``kind``.

    With ``rarefaction=True`` the sign of the ``g' z / 5`` term is flipped,
    giving the ODE of global (t > 0) similarity solutions.
    """
    kind = NdeKind.parse(kind)
    if kind is NdeKind.Time5:
        raise ValueError("Time5 is a first-order phase-plane ODE; use rhs_phase_plane")
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    s = -0.2 if not rarefaction else 0.2

    if kind in DEGENERATE_KINDS:

        def rhs(z, y):
            g0, g1, g2, g3, g4 = y
            top = (s * g1 * z - _leibniz_rest(kind, g0, g1, g2, g3, g4)) * reg_inverse(g0, nu)
            return np.array([g1, g2, g3, g4, top])

    elif kind is NdeKind.UniformNonDiv:

        def rhs(z, y):
            g0, g1, g2, g3, g4 = y
            return np.array([g1, g2, g3, g4, s * g1 * z / (1.0 + g0 * g0)])

    else:

        def rhs(z, y):
            g0, g1, g2, g3, g4 = y
            rest = _uniform_div_rest((g0, g1, g2, g3, g4, 0.0))
            return np.array([g1, g2, g3, g4, (s * g1 * z - rest) / (1.0 + g0 * g0)])

    rhs.kind = kind
    rhs.nu = nu
    return rhs


def rhs_blowup(p: SimilarityParams, nu: float = DEFAULT_NU):
    """f5 = [alpha f - beta f' y - 5 f' f'''' - 10 f'' f'''] / f (regularised)."""
    a, b = p.alpha, p.beta

    def rhs(y, f):
        f0, f1, f2, f3, f4 = f
        top = (a * f0 - b * f1 * y - 5 * f1 * f4 - 10 * f2 * f3) * reg_inverse(f0, nu)
        return np.array([f1, f2, f3, f4, top])

    rhs.params = p
    rhs.nu = nu
    return rhs


def rhs_global(p: SimilarityParams, nu: float = DEFAULT_NU):
    """F5 = [beta F' y - alpha F - 5 F' F'''' - 10 F'' F'''] / F (regularised)."""
    a, b = p.alpha, p.beta

    def rhs(y, F):
        F0, F1, F2, F3, F4 = F
        top = (b * F1 * y - a * F0 - 5 * F1 * F4 - 10 * F2 * F3) * reg_inverse(F0, nu)
        return np.array([F1, F2, F3, F4, top])

    rhs.params = p
    rhs.nu = nu
    return rhs


def rhs_phase_plane(A: float, B: float = 0.0):
    """dg/dz = (A z + B z^3) / (g - z^5) for the fifth-order-in-time NDE.

    The returned function carries ``singular_event`` (zero on g = z^5).
    """
    if not A > 0:
        raise ValueError("A = g'(0)^2 must be positive")
    if B < 0:
        raise ValueError("B must be nonnegative")

    def rhs(z, y):
        g = y[0]
        den = g - z**5
        if den == 0.0:
            raise ValueError(f"rhs evaluated on the singular manifold g = z^5 at z = {z}")
        return np.array([(A * z + B * z**3) / den])

    def singular_event(z, y):
        return y[0] - z**5

    rhs.singular_event = singular_event
    rhs.A, rhs.B = A, B
    return rhs


# ---------------------------------------------------------------------------
# residuals of the original (undivided) operators


def operator_residual(family, z, d, params: SimilarityParams | None = None, rarefaction=False):
    """Residual of the original ODE given derivatives ``d[k] = g^(k)``, k = 0..5.

    ``family`` is an :class:`NdeKind`, ``"Blowup"`` or ``"Global"``.
    Arrays broadcast over ``z``.
    """
    g0, g1, g2, g3, g4, g5 = (np.asarray(v, dtype=float) for v in d)
    z = np.asarray(z, dtype=float)
    if family in ("Blowup", "Global"):
        p = params or SimilarityParams(0.0)
        quad = g0 * g5 + 5 * g1 * g4 + 10 * g2 * g3  # (f f')''''
        if family == "Blowup":
            return -quad - p.beta * g1 * z + p.alpha * g0
        return -quad + p.beta * g1 * z - p.alpha * g0
    kind = NdeKind.parse(family)
    s = 0.2 if not rarefaction else -0.2
    if kind in DEGENERATE_KINDS:
        return g0 * g5 + _leibniz_rest(kind, g0, g1, g2, g3, g4) + s * g1 * z
    if kind is NdeKind.UniformNonDiv:
        return (1 + g0**2) * g5 + s * g1 * z
    if kind is NdeKind.UniformDiv:
        return (1 + g0**2) * g5 + _uniform_div_rest((g0, g1, g2, g3, g4, g5)) + s * g1 * z
    # Time5: (g g')'''' - (z^5 g')''''
    quad = g0 * g5 + 5 * g1 * g4 + 10 * g2 * g3
    lin = 120 * g1 * z + 240 * g2 * z**2 + 120 * g3 * z**3 + 20 * g4 * z**4 + g5 * z**5
    return quad - lin


# ---------------------------------------------------------------------------
# series at the origin


class _Poly:
    """Dense polynomial with exact-or-float coefficients (index = power)."""

    def __init__(self, c):
        self.c = list(c)

    def __add__(self, other):
        n = max(len(self.c), len(other.c))
        a = self.c + [0] * (n - len(self.c))
        b = other.c + [0] * (n - len(other.c))
        return _Poly([x + y for x, y in zip(a, b)])

    def __mul__(self, other):
        if not isinstance(other, _Poly):
            return _Poly([other * x for x in self.c])
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x == 0:
                continue
            for j, y in enumerate(other.c):
                out[i + j] += x * y
        return _Poly(out)

    __rmul__ = __mul__

    def deriv(self, m=1):
        c = self.c
        for _ in range(m):
            c = [k * c[k] for k in range(1, len(c))] or [0]
        return _Poly(c)

    def coef(self, k):
        return self.c[k] if k < len(self.c) else 0


def _series_residual(kind: NdeKind, g: _Poly) -> _Poly:
    d = [g.deriv(k) for k in range(6)]
    z = _Poly([0, 1])
    fifth = Fraction(1, 5)
    if kind is NdeKind.N50:
        quad = d[0] * d[5]
    elif kind is NdeKind.N41:
        quad = (d[0] * d[4]).deriv(1)
    elif kind is NdeKind.N32:
        quad = (d[0] * d[3]).deriv(2)
    elif kind is NdeKind.N23:
        quad = (d[0] * d[2]).deriv(3)
    else:
        quad = (d[0] * d[1]).deriv(4)
    return quad + fifth * (d[1] * z)


@dataclass(frozen=True)
class OriginSeries:
    """Truncated odd series ``C z + D z^3 + c5 z^5 + ...`` at the origin."""

    kind: NdeKind
    coeffs: tuple  # coefficient of z^k at index k

    def __call__(self, z) -> np.ndarray:
        c = [float(v) for v in self.coeffs]
        out = np.zeros(5)
        for m in range(5):
            acc = 0.0
            for k in range(m, len(c)):
                if c[k]:
                    acc += c[k] * _falling(k, m) * z ** (k - m)
            out[m] = acc
        return out

    def coefficient(self, k: int):
        return self.coeffs[k] if k < len(self.coeffs) else 0


def _falling(k, m):
    out = 1
    for j in range(m):
        out *= k - j
    return out


def series_origin(kind, C, D, order: int = 7) -> OriginSeries:
    """Odd origin expansion of a shock profile, matched order by order.

    The coefficients of z^5, z^7, z^9 are obtained by substituting the
    truncated series into the undivided ODE and cancelling the lowest
    surviving power of z; nothing is tabulated. ``C`` and ``D`` may be
    :class:`fractions.Fraction` for exact coefficients.
    """
    kind = NdeKind.parse(kind)
    if kind not in DEGENERATE_KINDS:
        raise ValueError(f"odd origin series only exist for the degenerate kinds, not {kind.value}")
    if order > 9:
        raise ValueError("coefficient matching is implemented up to z^9")
    if order < 3 or order % 2 == 0:
        raise ValueError("order must be odd and >= 3")
    if C == 0:
        raise ValueError("C must be nonzero")
    coeffs = [0, C, 0, D]
    for k in range(5, order + 1, 2):
        # residual is affine in c_k; its lowest new power is z^(k-4)
        trial0 = _series_residual(kind, _Poly(coeffs + [0, 0]))
        trial1 = _series_residual(kind, _Poly(coeffs + [0, 1]))
        r0, r1 = trial0.coef(k - 4), trial1.coef(k - 4)
        coeffs = coeffs + [0, -r0 / (r1 - r0)]
    return OriginSeries(kind, tuple(coeffs))


# ---------------------------------------------------------------------------
# transforms


def rescale(prof: Profile, a: float) -> Profile:
    """Scaling g_a(z) = a^5 g(z / a); the k-th derivative picks up a^(5-k)."""
    if a == 0:
        raise ValueError("scale factor must be nonzero")
    powers = np.array([a ** (5 - k) for k in range(5)])
    prov = dict(prof.provenance)
    prov["rescaled_by"] = prov.get("rescaled_by", 1.0) * a
    return replace(prof, mesh=prof.mesh * a, jets=prof.jets * powers, provenance=prov)


def reflect_to_rarefaction(prof: Profile) -> Profile:
    """z -> -z reflection turning a blow-up shock profile into a rarefaction one."""
    signs = np.array([1.0, -1.0, 1.0, -1.0, 1.0])
    return replace(
        prof,
        mesh=-prof.mesh[::-1],
        jets=(prof.jets * signs)[::-1],
        rarefaction=not prof.rarefaction,
    )
