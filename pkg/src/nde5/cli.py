"""Command-line front end: ``nde5 <command> [options]``.

Every command prints its headline numbers, and with ``--out DIR`` writes
CSV/JSON artifacts plus a ``manifest.json``. Exit codes: 0 success,
2 solver failure, 3 bad arguments.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import Nde5Error
from .models import NdeKind, Profile, SimilarityParams, parse_number

EXIT_OK, EXIT_SOLVER, EXIT_ARGS = 0, 2, 3

_KINDS = {
    "n50": NdeKind.N50,
    "n41": NdeKind.N41,
    "n32": NdeKind.N32,
    "n23": NdeKind.N23,
    "n14": NdeKind.N14,
    "uniform-div": NdeKind.UniformDiv,
    "uniform-nondiv": NdeKind.UniformNonDiv,
}

_CONTEXTS = {
    "equilibrium": "WkbjEquilibrium",
    "blowup-tail": "WkbjBlowupTail",
    "global-tail": "WkbjGlobalTail",
    "euler-quintic": "QuinticGrowthEuler",
    "shock-quintic": "QuinticGrowthShock",
    "vanishing-sqrt": "VanishingSqrt",
    "compacton-interface": "CompactonInterface",
}

# what each command reproduces, by result name
_ANCHORS = {
    "profile": "similarity shock profile of the NDE and its oscillatory tail",
    "shoot-d0": "shooting constant D0 of the N50 shock profile",
    "blowup": "blow-up similarity profile, f'''(0) for alpha = 1/9",
    "global-sweep": "nonuniqueness family of global similarity solutions",
    "roots": "characteristic equation of the asymptotic bundle",
    "compacton": "travelling-wave compactons and their interface oscillations",
    "rh": "Rankine-Hugoniot speed of a fifth-order jump",
    "rate": "L1 convergence rate and total-variation growth of the shock profile",
    "entropy-test": "delta-entropy test for the shocks S- and S+",
    "time5": "phase-plane profile of the fifth-order-in-time NDE",
    "evolve": "smooth-data evolution of the uniformly dispersive NDEs",
}


class ArgError(Exception):
    """Bad command-line input (exit code 3)."""


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let values such as "-1,1" or "-1/9" through as arguments
        self._negative_number_matcher = re.compile(r"^-\.?\d[\d.,/eE+-]*$")

    def error(self, message):
        raise ArgError(message)


def fmt(x) -> str:
    """Sixteen significant digits."""
    return f"{float(x):.16g}"


def _clean(obj):
    """JSON-safe copy with floats kept at full precision."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _dump(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# argument helpers


def _fraction(text) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ArgError(f"not a number: {text!r}") from exc


def _number(text) -> float:
    try:
        return parse_number(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ArgError(f"not a number: {text!r}") from exc


def _vector(text, n=None) -> list:
    vals = [_number(t) for t in str(text).split(",") if t.strip()]
    if n is not None and len(vals) != n:
        raise ArgError(f"expected {n} comma-separated values, got {len(vals)}")
    return vals


def _grid(text) -> list:
    """``start:stop:count`` (inclusive) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ArgError("grid must be start:stop:count")
        a, b = _number(parts[0]), _number(parts[1])
        try:
            n = int(parts[2])
        except ValueError as exc:
            raise ArgError("grid count must be an integer") from exc
        if n < 1:
            raise ArgError("grid count must be positive")
        return np.linspace(a, b, n).tolist()
    return _vector(text)


def _kind(text) -> NdeKind:
    key = str(text).lower()
    if key not in _KINDS:
        raise ArgError(f"unknown kind {text!r}; choose from {', '.join(_KINDS)}")
    return _KINDS[key]


def _load_profile(path) -> Profile:
    p = Path(path)
    if not p.with_suffix(".csv").exists():
        raise ArgError(f"profile file not found: {path}")
    return Profile.load(p)


def _threads():
    raw = os.environ.get("NDE5_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError as exc:
        raise ArgError("NDE5_THREADS must be an integer") from exc
    if n < 1:
        raise ArgError("NDE5_THREADS must be positive")
    return n


# ---------------------------------------------------------------------------
# output


class Run:
    """Collects printed lines, artifacts and metrics of one command."""

    def __init__(self, command: str, params: dict, out: Path | None, plot: bool):
        self.command = command
        self.params = params
        self.out = out
        self.plot = plot and out is not None
        self.outputs: list[str] = []
        self.metrics: dict = {}
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            if not os.access(out, os.W_OK):
                raise ArgError(f"output directory not writable: {out}")

    def say(self, line: str):
        print(line)

    def text(self, name: str, content: str):
        if self.out is None:
            return
        path = self.out / name
        path.write_text(content)
        self.outputs.append(str(path))

    def json(self, name: str, obj):
        self.text(name, _dump(obj))

    def profile(self, stem: str, prof: Profile):
        if self.out is None:
            return
        for path in prof.save(self.out / stem):
            self.outputs.append(str(path))
        if self.plot:
            self.svg(f"{stem}.svg", [(prof.mesh, prof.g)], "z", "g")

    def svg(self, name, series, xlabel="x", ylabel="y", logxy=False):
        if not self.plot:
            return
        self.text(name, svg_lines(series, xlabel, ylabel, logxy))

    def manifest(self):
        if self.out is None:
            return
        doc = {
            "command": self.command,
            "params": self.params,
            "paper_anchor": _ANCHORS[self.command],
            "outputs": sorted(self.outputs),
            "metrics": self.metrics,
        }
        (self.out / "manifest.json").write_text(_dump(doc))


def svg_lines(series, xlabel="x", ylabel="y", logxy=False, width=640, height=400) -> str:
    """Minimal static SVG line plot of ``[(x, y), ...]``."""
    pad = 50
    xs, ys = [], []
    for x, y in series:
        x, y = np.asarray(x, float), np.asarray(y, float)
        if logxy:
            keep = (x > 0) & (y > 0)
            x, y = np.log10(x[keep]), np.log10(y[keep])
        keep = np.isfinite(x) & np.isfinite(y)
        xs.append(x[keep])
        ys.append(y[keep])
    allx = np.concatenate(xs) if xs else np.zeros(1)
    ally = np.concatenate(ys) if ys else np.zeros(1)
    if allx.size == 0:
        allx = ally = np.zeros(1)
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#888"/>',
    ]
    for i, (x, y) in enumerate(zip(xs, ys)):
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{colors[i % len(colors)]}" stroke-width="1" points="{pts}"/>')
    tag = "log10 " if logxy else ""
    out.append(f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle">{tag}{xlabel} [{x0:.4g}, {x1:.4g}]</text>')
    out.append(f'<text x="14" y="{height / 2}" transform="rotate(-90 14 {height / 2})" text-anchor="middle">{tag}{ylabel} [{y0:.4g}, {y1:.4g}]</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_profile(a, run: Run):
    from .analysis import extend_profile, residual
    from .bvp import polish_shock, uniform_profile
    from .shooting import shoot_shock

    kind = _kind(a.kind)
    if kind in (NdeKind.UniformDiv, NdeKind.UniformNonDiv):
        sol = uniform_profile(kind, L=a.L)
        prof = sol.profile
        run.metrics.update(bvp_residual=sol.residual, iterations=sol.iterations)
        run.say(f"kind = {kind.value}")
        run.say(f"g(0) = {fmt(prof(0.0))}")
        run.profile("profile", prof)
        return
    shot = shoot_shock(kind, tol=1e-12, nu=a.nu)
    sol = polish_shock(shot, L=a.L)
    prof = sol.profile
    D = prof.provenance.get("D", shot.value)
    run.metrics.update(D_shooting=shot.value, D=D, bvp_residual=sol.residual, iterations=sol.iterations)
    run.say(f"kind = {kind.value}")
    run.say(f"D = {fmt(D)}")
    run.profile("profile", prof)
    if kind is NdeKind.N50:
        rep = residual(kind, prof)
        run.metrics["ode_residual_sup"] = rep.sup_jets
        try:
            lo = max(prof.mesh.min(), -95.0)
            ext = extend_profile(prof, window=(lo, 0.25 * lo))
            fit = ext.fit
        except Nde5Error as exc:
            print(f"warning: tail fit unavailable: {exc}", file=sys.stderr)
            return
        tail = {
            "envelope_exponent": fit.envelope_exponent,
            "phase_exponent": fit.phase_exponent,
            "a0": fit.a0,
            "A": fit.A,
            "B": fit.B,
            "residual": fit.residual,
            "z_switch": ext.z_switch,
        }
        run.metrics["tail_fit"] = tail
        run.json("tail_fit.json", tail)
        run.say(f"envelope exponent p = {fmt(fit.envelope_exponent)}")
        run.say(f"phase exponent q = {fmt(fit.phase_exponent)}")
        run.say(f"a0 = {fmt(fit.a0)}")


def cmd_shoot_d0(a, run: Run):
    from .shooting import shoot_shock

    kind = _kind(a.kind)
    if kind not in (NdeKind.N50, NdeKind.N41, NdeKind.N32, NdeKind.N23, NdeKind.N14):
        raise ArgError("shoot-d0 needs a degenerate kind (n50 ... n14)")
    bracket = tuple(_vector(a.bracket, 2))
    res = shoot_shock(kind, bracket, tol=a.tol)
    run.say(f"D0 = {fmt(res.value)}")
    run.metrics.update(D0=res.value, reliable_to=res.reliable_to, bisections=len(res.history))
    run.json("shoot.json", res.to_dict())
    run.profile("profile", res.profile)


def cmd_blowup(a, run: Run):
    from .shooting import shoot_blowup

    alpha = _fraction(a.alpha)
    p = SimilarityParams(alpha)
    f0, f1 = _number(a.f0), _number(a.f1)
    bracket = tuple(_vector(a.bracket, 2))
    res = shoot_blowup(p, f1=f1, bracket=bracket, tol=a.tol, f0=f0)
    run.say(f"f3 = {fmt(res.value)}")
    run.metrics.update(f3=res.value, alpha=p.alpha, beta=p.beta, f0=f0, f1=f1, reliable_to=res.reliable_to)
    run.json("shoot.json", res.to_dict())
    run.profile("profile", res.profile)


def cmd_global_sweep(a, run: Run):
    from .shooting import sweep_family

    alpha = _fraction(a.alpha)
    c0, f1 = _number(a.c0), _number(a.f1)
    grid = [(alpha, c0, F0, f1) for F0 in _grid(a.f0_grid)]
    entries = sweep_family("Global", grid, threads=_threads(), L=a.L)
    ok = [e for e in entries if e.status == "converged"]
    sep = None
    if len(ok) > 1:
        z = np.linspace(-0.5 * a.L, 0.0, 401)
        vals = [e.profile(z) for e in ok]
        sep = min(float(np.max(np.abs(u - v))) for i, u in enumerate(vals) for v in vals[i + 1 :])
    for e in entries:
        F0 = e.params[2]
        if e.status == "converged":
            run.say(f"F0 = {fmt(F0)}  converged  tail exponent = {fmt(e.metrics['tail_exponent'])}")
        else:
            run.say(f"F0 = {fmt(F0)}  failed  {e.error}")
    run.say(f"converged = {len(ok)}/{len(entries)}")
    if sep is not None:
        run.say(f"min separation = {fmt(sep)}")
    run.metrics.update(
        converged=len(ok),
        total=len(entries),
        min_separation=sep,
        expected_tail_exponent=SimilarityParams(alpha).tail_exponent,
    )
    run.json("sweep.json", [e.to_dict() for e in entries])
    for i, e in enumerate(ok):
        run.profile(f"profile_{i:02d}", e.profile)
    if ok:
        run.svg("family.svg", [(e.profile.mesh, e.profile.g) for e in ok], "y", "f")
    if not ok:
        raise Nde5Error("no grid point converged")


def cmd_roots(a, run: Run):
    from .asymptotics import char_exponents

    ctx = _CONTEXTS.get(a.context)
    if ctx is None:
        raise ArgError(f"unknown context {a.context!r}; choose from {', '.join(_CONTEXTS)}")
    p = SimilarityParams(_fraction(a.alpha), _number(a.c0))
    rep = char_exponents(ctx, p)
    doc = rep.to_dict()
    print(json.dumps(_clean(doc), sort_keys=True))
    run.metrics.update(admissible_count=rep.admissible_count, bundle_dimension=rep.bundle_dimension)
    run.json("roots.json", doc)


def cmd_compacton(a, run: Run):
    from .compactons import explicit_compacton, oscillatory_compacton, tw_residual

    which = a.which.lower()
    if which in ("k22", "quintic"):
        prof = explicit_compacton("K22" if which == "k22" else "Quintic")
        y = np.linspace(-0.999 * prof.y0, 0.999 * prof.y0, 2001)
        res = float(np.max(np.abs(tw_residual(prof.tag, y))))
        run.say(f"y0 = {fmt(prof.y0)}")
        run.say(f"residual = {fmt(res)}")
        run.metrics.update(y0=prof.y0, residual=res)
    elif which == "oscillatory":
        prof = oscillatory_compacton(branch=a.branch, nu=a.nu)
        osc = prof.oscillation
        run.say(f"y0 = {fmt(prof.y0)}")
        run.say(f"F(0) = {fmt(prof(0.0))}")
        run.say(f"sign changes = {osc['sign_changes']}")
        run.say(f"envelope exponent = {fmt(osc['envelope_exponent'])}")
        run.metrics.update(y0=prof.y0, F0=float(prof(0.0)), oscillation=osc)
    else:
        raise ArgError("--which must be k22, quintic or oscillatory")
    run.text("compacton.csv", prof.to_csv())
    run.json("compacton.json", prof.metadata())
    if run.plot:
        yy = np.linspace(-prof.y0, prof.y0, 801)
        run.svg("compacton.svg", [(yy, prof(yy))], "y", "F")


def cmd_rh(a, run: Run):
    from .analysis import JumpJets, rh_speed

    minus, plus = _vector(a.minus, 5), _vector(a.plus, 5)
    # exact rational arithmetic, rounded once for display
    exact = [tuple(_fraction(v) for v in side.split(",") if v.strip()) for side in (a.minus, a.plus)]
    lam, num = rh_speed(JumpJets(*exact))
    run.say(f"lambda = {fmt(lam)}")
    if lam.denominator != 1:
        run.say(f"lambda (exact) = {lam}")
    run.metrics.update(minus=minus, plus=plus, speed=float(lam), bracket_jump=float(num))


def cmd_rate(a, run: Run):
    from .analysis import extend_profile, l1_rate, tv_growth

    prof = _load_profile(a.profile)
    ext = extend_profile(prof)
    rep = l1_rate(ext) if a.what == "l1" else tv_growth(ext)
    run.say(f"exponent = {fmt(rep.exponent)}")
    run.metrics.update(exponent=rep.exponent, fit_residual=rep.fit_residual)
    run.text("rate.csv", "x,value\n" + "".join(f"{fmt(x)},{fmt(v)}\n" for x, v in zip(rep.x, rep.values)))
    run.svg("rate.svg", [(rep.x, rep.values)], "t" if a.what == "l1" else "Z", a.what, logxy=True)


def cmd_entropy(a, run: Run):
    from .analysis import delta_entropy_test, extend_profile

    prof = _load_profile(a.profile)
    ext = extend_profile(prof)
    shock = {"s-minus": "S-", "s-plus": "S+"}[a.shock]
    deltas = np.geomspace(_number(a.delta_min), _number(a.delta_max), a.n_delta)
    ver = delta_entropy_test(shock, ext, deltas)
    d = ver.to_dict()
    run.say(f"verdict = {d['verdict']}")
    run.metrics.update({k: v for k, v in d.items() if k not in ("deltas", "distances")})
    run.text("entropy.csv", ver.to_csv())
    run.svg("entropy.svg", [(d["deltas"], d["distances"])], "delta", "distance", logxy=True)


def cmd_time5(a, run: Run):
    from .shooting import shoot_time5

    A, B = _number(a.A), _number(a.B)
    if A <= 0:
        raise ArgError("--A must be positive")
    prof = shoot_time5(A, B)
    run.say(f"g(-inf) = {fmt(prof.provenance.get('far_field', 1.0))}")
    run.say(f"g'(0) = {fmt(prof(0.0, 1))}")
    run.metrics.update(_clean(prof.provenance))
    run.profile("profile", prof)


def cmd_evolve(a, run: Run):
    from .evolution import evolve, mollify, shock_indicator

    kind = _kind(a.kind)
    if kind not in (NdeKind.UniformDiv, NdeKind.UniformNonDiv):
        raise ArgError("evolve supports uniform-div and uniform-nondiv")
    data = {"s-plus": "S+", "s-minus": "S-"}[a.data]
    fld = mollify(data, _number(a.delta), L=a.L, N=a.N)
    t0 = time.perf_counter()
    snaps = evolve(fld, kind, _number(a.t_end), cfl=a.cfl)
    elapsed = time.perf_counter() - t0
    rows = []
    for i, s in enumerate(snaps):
        ind = shock_indicator(s).to_dict()
        rows.append({"t": s.t, **ind})
        run.text(f"snapshot_{i:02d}.csv", s.to_csv())
        run.say(f"t = {fmt(s.t)}  max|u_x| = {fmt(ind['max_gradient'])}  tail = {fmt(ind['spectral_tail'])}")
    run.metrics.update(
        N=fld.N,
        L=fld.L,
        kind=kind.value,
        dt=snaps[-1].meta["dt"],
        steps=snaps[-1].meta["steps"],
        cfl=a.cfl,
        sigma=fld.meta["sigma"],
        indicators=rows,
    )
    print(f"elapsed {elapsed:.3f} s", file=sys.stderr)
    run.svg("evolve.svg", [(s.x, s.u) for s in snaps], "x", "u")


_COMMANDS = {
    "profile": cmd_profile,
    "shoot-d0": cmd_shoot_d0,
    "blowup": cmd_blowup,
    "global-sweep": cmd_global_sweep,
    "roots": cmd_roots,
    "compacton": cmd_compacton,
    "rh": cmd_rh,
    "rate": cmd_rate,
    "entropy-test": cmd_entropy,
    "time5": cmd_time5,
    "evolve": cmd_evolve,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", type=Path, help="directory for CSV/JSON artifacts and manifest.json")
    common.add_argument("--plot", action="store_true", help="also write SVG plots (needs --out)")

    ap = _Parser(prog="nde5", description="Similarity profiles, shocks and compactons of fifth-order NDEs.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("profile", parents=[common], help="shock profile by shooting and BVP polish")
    s.add_argument("--kind", required=True, choices=sorted(_KINDS))
    s.add_argument("--nu", type=float, default=1e-4)
    s.add_argument("--L", type=float, default=100.0)

    s = sub.add_parser("shoot-d0", parents=[common], help="shooting constant D0")
    s.add_argument("--kind", default="n50", choices=sorted(_KINDS))
    s.add_argument("--bracket", default="-1,1")
    s.add_argument("--tol", type=float, default=1e-10)

    s = sub.add_parser("blowup", parents=[common], help="blow-up similarity profile, f'''(0) by shooting")
    s.add_argument("--alpha", default="1/9")
    s.add_argument("--f0", default="0")
    s.add_argument("--f1", default="-1")
    s.add_argument("--bracket", default="-1,1")
    s.add_argument("--tol", type=float, default=1e-10)

    s = sub.add_parser("global-sweep", parents=[common], help="family of global similarity solutions")
    s.add_argument("--alpha", default="1/9")
    s.add_argument("--c0", default="1")
    s.add_argument("--f0-grid", default="1:9:9")
    s.add_argument("--f1", default="0")
    s.add_argument("--L", type=float, default=100.0)

    s = sub.add_parser("roots", parents=[common], help="characteristic roots of an asymptotic bundle")
    s.add_argument("--context", required=True, choices=sorted(_CONTEXTS))
    s.add_argument("--alpha", default="1/9")
    s.add_argument("--c0", default="1")

    s = sub.add_parser("compacton", parents=[common], help="explicit or oscillatory compacton")
    s.add_argument("--which", required=True, choices=["k22", "quintic", "oscillatory"])
    s.add_argument("--branch", type=int, default=1, choices=[1, 2])
    s.add_argument("--nu", type=float, default=1e-8)

    s = sub.add_parser("rh", parents=[common], help="Rankine-Hugoniot speed from one-sided jets")
    s.add_argument("--minus", required=True)
    s.add_argument("--plus", required=True)

    s = sub.add_parser("rate", parents=[common], help="L1 rate or TV growth of a profile")
    s.add_argument("--what", required=True, choices=["l1", "tv"])
    s.add_argument("--profile", required=True)

    s = sub.add_parser("entropy-test", parents=[common], help="delta-entropy verdict for S- or S+")
    s.add_argument("--shock", required=True, choices=["s-minus", "s-plus"])
    s.add_argument("--profile", required=True)
    s.add_argument("--delta-min", default="1e-6")
    s.add_argument("--delta-max", default="1e-2")
    s.add_argument("--n-delta", type=int, default=9)

    s = sub.add_parser("time5", parents=[common], help="phase-plane profile of the time-fifth-order NDE")
    s.add_argument("--A", default="1")
    s.add_argument("--B", default="0")

    s = sub.add_parser("evolve", parents=[common], help="pseudospectral evolution of mollified step data")
    s.add_argument("--kind", default="uniform-nondiv", choices=["uniform-nondiv", "uniform-div"])
    s.add_argument("--data", default="s-plus", choices=["s-plus", "s-minus"])
    s.add_argument("--delta", default="3")
    s.add_argument("--t-end", default="0.1")
    s.add_argument("--L", type=float, default=50.0)
    s.add_argument("--N", type=int, default=256)
    s.add_argument("--cfl", type=float, default=1.0)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        params = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "out", "plot")}
        run = Run(args.command, _clean(params), args.out, args.plot)
        t0 = time.perf_counter()
        _COMMANDS[args.command](args, run)
        run.metrics.setdefault("command", args.command)
        run.manifest()
        if args.out is not None:
            print(f"wrote {len(run.outputs) + 1} files to {args.out} in {time.perf_counter() - t0:.2f} s", file=sys.stderr)
        return EXIT_OK
    except ArgError as exc:
        print(f"nde5: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except Nde5Error as exc:
        print(f"nde5: solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"nde5: bad input: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
