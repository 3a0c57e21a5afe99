from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from nde5.analysis import (
    JumpJets,
    critical_solution,
    extend_profile,
    delta_entropy_test,
    fd_weights,
    flux_bracket,
    l1_deficiency,
    l1_rate,
    residual,
    rh_speed,
    tv_growth,
    uniform_nde_symmetry_check,
    weak_stationary_shock,
)
from nde5.errors import DegenerateFit, FitDiverged, InsufficientTail
from nde5.models import Profile, SimilarityParams

y, C, a = sp.symbols("y C alpha")


def test_fd_weights_classic():
    assert np.allclose(fd_weights(0.0, [-1, 0, 1], 2), [1, -2, 1])
    assert np.allclose(fd_weights(0.0, [-2, -1, 0, 1, 2], 1), [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.floats(-1, 1))
def test_fd_weights_exact_on_polynomials(m, x0):
    nodes = np.linspace(-1, 1, 9) + 0.01 * np.sin(np.arange(9))
    w = fd_weights(x0, nodes, m)
    for k in range(9):
        exact = np.prod(np.arange(k, k - m, -1)) * x0 ** (k - m) if k >= m else 0.0
        assert w @ nodes**k == pytest.approx(exact, abs=1e-7 * max(1, abs(exact)))


def test_critical_polynomial_sympy_oracle():
    f = C * y - sp.Rational(24, 362880) * y**5
    beta = (1 + a) / 5
    res = sp.expand(-sp.diff(f * sp.diff(f, y), y, 4) - beta * sp.diff(f, y) * y + a * f)
    assert sp.simplify(res - 4 * C * y * (21 * a - 4) / 105) == 0


def test_critical_solution_exact_at_4_21():
    prof, d5 = critical_solution()
    assert residual("Blowup", prof, d5=d5).sup_jets < 1e-12


def test_critical_solution_off_alpha():
    prof, d5 = critical_solution(alpha=Fraction(17, 84))
    # 4 C y (21 alpha - 4)/105 with |y| <= 5
    assert residual("Blowup", prof, d5=d5).sup_jets == pytest.approx(20 * (21 * 17 / 84 - 4) / 105, rel=1e-9)


def test_weak_stationary_shock():
    prof, d5 = weak_stationary_shock()
    assert residual("Blowup", prof, d5=d5).sup_jets < 1e-12
    with pytest.raises(ValueError):
        weak_stationary_shock(np.linspace(-1, 1, 100))


def test_residual_needs_mesh():
    prof, d5 = critical_solution(mesh=np.linspace(-1, 0, 20))
    with pytest.raises(ValueError):
        residual("Blowup", prof, d5=d5)


def test_polished_profile_residual(n50_polished):
    rep = residual("N50", n50_polished.profile)
    assert rep.sup_jets < 1e-3
    assert rep.l2_jets <= rep.sup_jets * np.sqrt(200)


def test_flux_bracket_sympy():
    x = sp.symbols("x")
    F = sp.Function("F")(x)
    expr = sp.expand(sp.diff(F * sp.diff(F, x), x, 3))
    d = [sp.diff(F, x, k) for k in range(5)]
    assert sp.simplify(expr - (d[0] * d[4] + 4 * d[1] * d[3] + 3 * d[2] ** 2)) == 0
    assert flux_bracket((1, 2, 3, 4, 5)) == 5 + 32 + 27


_q = st.fractions(min_value=-50, max_value=50, max_denominator=50)


@settings(max_examples=100, deadline=None)
@given(st.lists(_q, min_size=5, max_size=5), st.lists(_q, min_size=5, max_size=5))
def test_rh_identities_exact(m, p):
    if m[0] == p[0]:
        with pytest.raises(ValueError):
            rh_speed(JumpJets(tuple(m), tuple(p)))
        return
    lam, num = rh_speed(JumpJets(tuple(m), tuple(p)))
    assert isinstance(lam, Fraction)
    assert lam * (p[0] - m[0]) == num
    # swapping the sides leaves the speed unchanged
    assert rh_speed(JumpJets(tuple(p), tuple(m)))[0] == lam
    # anti-symmetric jets: F -> -F leaves (F F')''' unchanged
    neg = tuple(-v for v in m)
    if m[0] != 0:
        assert rh_speed(JumpJets(tuple(m), neg))[0] == 0
    # scaling F by c scales the speed by c
    assert rh_speed(JumpJets(tuple(3 * v for v in m), tuple(3 * v for v in p)))[0] == 3 * lam


def test_jump_jets_validation():
    with pytest.raises(ValueError):
        JumpJets((1, 0), (0, 0, 0, 0, 0))


def test_extension_matches_profile(n50_extended, n50_polished):
    ext = n50_extended
    z = np.linspace(-20, 0, 41)
    lvl = n50_polished.profile.provenance["far_field"]
    scale = lvl ** (-0.2)
    ref = n50_polished.profile(z / scale) * scale**5
    assert np.max(np.abs(ext(z) - ref)) < 1e-10
    # odd extension and far field 1
    assert np.allclose(ext(-z), -ext(z))
    assert ext(-1e4) == pytest.approx(1.0, abs=1e-2)


def test_rates(n50_extended):
    assert l1_rate(n50_extended).exponent == pytest.approx(0.125, abs=0.02)
    assert tv_growth(n50_extended).exponent == pytest.approx(0.625, abs=0.05)
    assert l1_deficiency(n50_extended).exponent == pytest.approx(0.375, abs=0.05)


def test_rate_report_validation(n50_extended):
    with pytest.raises(ValueError):
        l1_rate(n50_extended, t_grid=[1e-12, 2e-12, 3e-12])


def test_constant_profile_has_no_rate():
    z = np.linspace(-100, 0, 300)
    jets = np.column_stack([np.ones_like(z)] + [np.zeros_like(z)] * 4)
    prof = Profile("N50", SimilarityParams(), z, jets, {"far_field": 1.0})
    with pytest.raises((InsufficientTail, DegenerateFit, FitDiverged)):
        l1_rate(extend_profile(prof))


def test_entropy_verdicts(n50_extended):
    deltas = np.geomspace(1e-6, 1e-2, 9)
    assert delta_entropy_test("S-", n50_extended, deltas).verdict == "Entropy"
    assert delta_entropy_test("S+", n50_extended, deltas).verdict == "NonEntropy"
    with pytest.raises(ValueError):
        delta_entropy_test("S-", n50_extended, [])
    with pytest.raises(ValueError):
        delta_entropy_test("S0", n50_extended, deltas)


def test_entropy_csv(n50_extended):
    v = delta_entropy_test("S+", n50_extended, np.geomspace(1e-4, 1e-2, 5))
    lines = v.to_csv().splitlines()
    assert lines[0] == "delta,distance" and len(lines) == 6


def test_symmetry_check(n50_polished):
    # the degenerate N50 operator is not invariant under g -> -g
    assert not uniform_nde_symmetry_check(n50_polished.profile)
