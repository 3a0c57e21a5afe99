"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import itertools
import re
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import ACCEPTANCE_LINES
from nde5.analysis import (
    JumpJets,
    critical_solution,
    delta_entropy_test,
    l1_rate,
    residual,
    rh_speed,
    tv_growth,
    weak_stationary_shock,
)
from nde5.asymptotics import char_exponents
from nde5.cli import main
from nde5.compactons import robustness_probe, tw_residual
from nde5.evolution import evolve, make_field, mollify, shock_indicator, stable_dt
from nde5.models import SimilarityParams
from nde5.shooting import sweep_family

from test_bvp import manufactured_errors


def report(n, label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {label}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def _cli_value(capsys, argv, key):
    t0 = time.perf_counter()
    code = main(argv)
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out
    m = re.search(rf"^{re.escape(key)} = (\S+)$", out, re.M)
    return code, (float(m.group(1)) if m else None), elapsed


def test_criterion_01_shooting_constant(capsys):
    code, D0, elapsed = _cli_value(capsys, ["shoot-d0", "--kind", "n50", "--bracket", "-1,1"], "D0")
    ok = code == 0 and abs(D0 - 0.069192424) <= 5e-3 and elapsed < 30
    report(1, "shoot-d0 --kind n50", ok, f"D0 = {D0:.10g} (target 0.069192424 +- 5e-3), {elapsed:.1f} s")
    assert ok


def test_criterion_02_blowup_shooting(capsys):
    # f'(0) = -1 in this package's sign convention corresponds to |f'(0)| = 1
    code, f3, elapsed = _cli_value(capsys, ["blowup", "--alpha", "1/9", "--f1", "-1"], "f3")
    ok = code == 0 and abs(f3 - 0.0718040128557) <= 1e-3 and elapsed < 30
    report(2, "blowup alpha = 1/9", ok, f"f'''(0) = {f3:.10g} (target 0.0718040128557 +- 1e-3), {elapsed:.1f} s")
    assert ok


def test_criterion_03_oscillatory_tail(n50_extended):
    fit = n50_extended.fit
    ok = (
        abs(fit.envelope_exponent + 5 / 8) <= 0.05
        and abs(fit.phase_exponent - 5 / 4) <= 0.05
        and abs(fit.a0 - 0.534992) <= 0.01
    )
    report(
        3,
        "N50 tail fit",
        ok,
        f"p = {fit.envelope_exponent:.4f}, q = {fit.phase_exponent:.4f}, a0 = {fit.a0:.5f}",
    )
    assert ok


def test_criterion_04_rates(n50_extended):
    l1 = l1_rate(n50_extended).exponent
    tv = tv_growth(n50_extended).exponent
    ok = abs(l1 - 0.125) <= 0.02 and abs(tv - 0.625) <= 0.05
    report(4, "L1 rate and TV growth", ok, f"L1 exponent = {l1:.4f} (0.125 +- 0.02), TV exponent = {tv:.4f} (0.625 +- 0.05)")
    assert ok


def test_criterion_05_exact_solutions():
    prof, d5 = critical_solution()
    r_cr = residual("Blowup", prof, d5=d5).sup_jets
    prof, d5 = weak_stationary_shock()
    r_st = residual("Blowup", prof, d5=d5).sup_jets
    y = np.linspace(-0.999 * 2 * np.pi, 0.999 * 2 * np.pi, 2001)
    r_k = float(np.max(np.abs(tw_residual("K22", y))))
    ok = r_cr < 1e-10 and r_st < 1e-12 and r_k < 1e-12
    report(
        5,
        "exact solutions",
        ok,
        f"critical polynomial at alpha = 4/21: {r_cr:.2e}; stationary shock: {r_st:.2e}; K22: {r_k:.2e}",
    )
    assert ok


@pytest.mark.xfail(strict=True, reason="the critical polynomial is exact only at alpha = 4/21; at 17/84 the residual is 4Cy/1260")
def test_criterion_05_critical_polynomial_at_17_84():
    prof, d5 = critical_solution(alpha=Fraction(17, 84))
    r = residual("Blowup", prof, d5=d5).sup_jets
    ok = r < 1e-10
    report(5, "critical polynomial at alpha = 17/84", ok, f"residual = {r:.3e} (required < 1e-10; not attainable, see ledger)")
    assert ok


def _matches(roots, want, tol):
    return all(min(abs(r - w) for r in roots) < tol for w in want) and len(roots) == len(want)


def test_criterion_06_root_sets():
    gg5 = char_exponents("CompactonInterface").roots
    lin = char_exponents("QuinticGrowthShock").roots
    ok_gg5 = _matches(gg5, [-4, 7, (3 + 1j * np.sqrt(111)) / 2, (3 - 1j * np.sqrt(111)) / 2], 1e-10)
    ok_lin = _matches(lin, [0, 5, (5 + 1j * np.sqrt(15)) / 2, (5 - 1j * np.sqrt(15)) / 2], 1e-10)
    alphas = np.linspace(0, 0.25, 52)[1:-1]
    blow = {char_exponents("WkbjBlowupTail", SimilarityParams(a)).admissible_count for a in alphas}
    glob = {char_exponents("WkbjGlobalTail", SimilarityParams(a)).admissible_count for a in alphas}
    h = {
        char_exponents("QuinticGrowthEuler", SimilarityParams(a), tol=t).extras["negative_real_roots"]
        for a in alphas
        for t in (1e-6, 1e-9, 1e-12)
    }
    ok = ok_gg5 and ok_lin and blow == {3} and glob == {2} and len(h) == 1
    report(
        6,
        "root sets",
        ok,
        f"interface roots {ok_gg5}, quintic-shock roots {ok_lin}, blow-up tail counts {sorted(blow)}, "
        f"global tail counts {sorted(glob)}, h_alpha negative roots {sorted(h)} (computed)",
    )
    assert ok


def test_criterion_07_nonuniqueness_family():
    t0 = time.perf_counter()
    grid = [(Fraction(1, 9), 1.0, float(F0), 0.0) for F0 in range(1, 10)]
    entries = sweep_family("Global", grid)
    elapsed = time.perf_counter() - t0
    ok_entries = [e for e in entries if e.status == "converged"]
    slopes = [e.metrics["tail_exponent"] for e in ok_entries]
    z = np.linspace(-50, 0, 501)
    vals = [e.profile(z) for e in ok_entries]
    sep = min(np.max(np.abs(u - v)) for u, v in itertools.combinations(vals, 2))
    frac = len(ok_entries) / len(entries)
    ok = frac >= 0.9 and all(abs(s - 0.5) <= 0.05 for s in slopes) and sep > 1e-2 and elapsed < 300
    report(
        7,
        "global family alpha = 1/9",
        ok,
        f"converged {len(ok_entries)}/{len(entries)}, tail exponents in [{min(slopes):.4f}, {max(slopes):.4f}], "
        f"min separation {sep:.3g}, {elapsed:.1f} s",
    )
    assert ok


def test_criterion_08_entropy_verdicts(n50_extended):
    grids = {
        "base": np.geomspace(1e-6, 1e-2, 9),
        "halved values": np.geomspace(1e-6, 1e-2, 9) / 2,
        "every other point": np.geomspace(1e-6, 1e-2, 9)[::2],
    }
    verdicts = {}
    for name, deltas in grids.items():
        verdicts[name] = (
            delta_entropy_test("S-", n50_extended, deltas).verdict,
            delta_entropy_test("S+", n50_extended, deltas).verdict,
        )
    ok = all(v == ("Entropy", "NonEntropy") for v in verdicts.values())
    report(8, "delta-entropy", ok, "; ".join(f"{k}: S- {a}, S+ {b}" for k, (a, b) in verdicts.items()))
    assert ok


_q = st.fractions(min_value=-100, max_value=100, max_denominator=100)


@settings(max_examples=200, deadline=None)
@given(st.lists(_q, min_size=5, max_size=5), st.lists(_q, min_size=4, max_size=4))
def _rh_identities(m, tail):
    if m[0] == 0:
        return
    neg = tuple(-v for v in m)
    assert rh_speed(JumpJets(tuple(m), neg))[0] == 0
    p = (m[0] + 1, *tail)
    lam, num = rh_speed(JumpJets(tuple(m), p))
    assert lam * (p[0] - m[0]) == num
    assert rh_speed(JumpJets(p, tuple(m)))[0] == lam


def test_criterion_09_rankine_hugoniot(capsys):
    code = main(["rh", "--minus", "1,0,0,0,0", "--plus", "-1,0,0,0,0"])
    out = capsys.readouterr().out.strip()
    lam, _ = rh_speed(JumpJets((Fraction(1), 0, 0, 0, 0), (Fraction(-1), 0, 0, 0, 0)))
    try:
        _rh_identities()
        random_ok = True
    except AssertionError:
        random_ok = False
    ok = code == 0 and out == "lambda = 0" and lam == 0 and random_ok
    report(9, "Rankine-Hugoniot", ok, f"CLI '{out}', exact lambda = {lam}, randomized exact identities {random_ok}")
    assert ok


def test_criterion_10_compactons(compacton_branch1):
    osc = compacton_branch1.oscillation
    rep = robustness_probe(eps=(0.0,))
    tol = rep.tol
    fifth = rep.case("fifth-order")
    third = rep.case("third-order")
    ok = (
        osc["sign_changes"] >= 3
        and abs(osc["envelope_exponent"] - 8) <= 0.3
        and fifth.min_defect > 1e3 * tol
        and third.min_defect < tol
        and abs(third.argmin_y0 - 2 * np.pi) < 1e-6
    )
    report(
        10,
        "compactons",
        ok,
        f"branch 1 y0 = {compacton_branch1.y0:.9f}, {osc['sign_changes']} sign changes, envelope {osc['envelope_exponent']:.4f}; "
        f"fifth-order defect {fifth.min_defect:.3g} (> {1e3 * tol:g}), third-order defect {third.min_defect:.2e} at y0 = {third.argmin_y0:.10f}",
    )
    assert ok


def test_criterion_11_evolution():
    t0 = time.perf_counter()
    L, N = 50.0, 256
    k = 8 * np.pi / L
    lin = make_field(lambda x: 1e-6 * np.sin(k * x), L, N)
    end = evolve(lin, "UniformNonDiv", 0.1)[-1]
    c1, c0 = np.fft.rfft(end.u)[8], np.fft.rfft(lin.u)[8]
    phase_err = abs(c1 / c0 - np.exp(-1j * k**5 * 0.1))

    smooth = make_field(lambda x: 0.5 * np.exp(-(x**2) / 40) * np.cos(x / 4), L, N)
    dt = stable_dt(smooth)
    snaps = evolve(smooth, "UniformDiv", 1000 * dt, dt=dt)
    drift = abs(np.sum(snaps[-1].u) - np.sum(smooth.u)) * 2 * L / N

    splus = evolve(mollify("S+", 3.0, L=L, N=N), "UniformNonDiv", 0.1)
    g0, g1 = shock_indicator(splus[0]).max_gradient, shock_indicator(splus[-1]).max_gradient
    elapsed = time.perf_counter() - t0
    ok = phase_err < 1e-8 and drift < 1e-10 and snaps[-1].meta["steps"] == 1000 and g1 < g0 and elapsed < 120
    report(
        11,
        "evolution",
        ok,
        f"linear-mode error {phase_err:.2e}, mass drift over 1000 steps {drift:.2e}, "
        f"max|u_x| {g0:.4f} -> {g1:.4f}, {elapsed:.1f} s",
    )
    assert ok


def test_criterion_12_numerical_hygiene(n50_shot, n50_polished):
    orders = []
    for cluster in (None, "right"):
        e = manufactured_errors(cluster)
        orders.extend(np.log2(e[:-1] / e[1:]).tolist())
    z = np.linspace(-10, 0, 1001)
    xval = float(np.max(np.abs(n50_polished.profile(z) - n50_shot.profile(z))))
    ok = all(abs(o - 4) <= 0.5 for o in orders) and xval < 1e-3
    report(
        12,
        "numerical hygiene",
        ok,
        f"mesh-refinement orders {', '.join(f'{o:.2f}' for o in orders)}; shooting vs BVP sup on [-10, 0] = {xval:.2e}",
    )
    assert ok
