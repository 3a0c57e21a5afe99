from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from nde5.asymptotics import (
    CONTEXTS,
    char_exponents,
    equilibrium_frequency,
    fit_oscillatory_tail,
    interface_expansion,
    poly_roots,
    sturm_count,
)
from nde5.models import Profile, SimilarityParams


def _close_sets(a, b, tol):
    b = list(b)
    if len(a) != len(b):
        return False
    for x in a:
        k = min(range(len(b)), key=lambda i: abs(b[i] - x))
        if abs(b.pop(k) - x) >= tol:
            return False
    return True


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6))
def test_poly_roots_reconstruct_polynomial(rts):
    rts = np.round(rts, 2)
    coeffs = np.poly(rts)
    got = poly_roots(coeffs)
    assert np.allclose(np.poly(got).real, coeffs, atol=1e-6 * max(1, np.max(np.abs(coeffs))))


def test_poly_roots_merges_repeated_root():
    got = poly_roots(np.poly([2, 2, 2, -1]))
    assert np.count_nonzero(np.isclose(got, 2.0, atol=1e-9)) == 3


def test_poly_roots_rejects_zero_polynomial():
    with pytest.raises(ValueError):
        poly_roots([0, 0])


def test_sturm_count_matches_sympy():
    x = sp.symbols("x")
    p = sp.expand((x - 1) * (x + 2) * (x - 3) * (x**2 + 1))
    coeffs = [float(c) for c in sp.Poly(p, x).all_coeffs()]
    assert sturm_count(coeffs, -np.inf, np.inf) == 3
    assert sturm_count(coeffs, 0.0, 5.0) == 2
    assert sturm_count(coeffs, -np.inf, 0.0) == 1


def test_equilibrium_frequency():
    assert equilibrium_frequency() == pytest.approx(4 * 5 ** (-1.25), rel=1e-14)
    rep = char_exponents("WkbjEquilibrium")
    assert rep.extras["a0"] == pytest.approx(0.534992, abs=1e-6)
    assert rep.admissible_count == 2


def test_compacton_interface_roots_exact():
    m = sp.symbols("m")
    exact = sp.Poly(m * (m - 1) * (m - 2) * (m - 3) - 840, m).nroots(n=30)
    rep = char_exponents("CompactonInterface")
    assert _close_sets(rep.roots, [complex(r) for r in exact], 1e-12)


def test_quintic_shock_roots():
    rep = char_exponents("QuinticGrowthShock")
    want = [0, 5, (5 + 1j * np.sqrt(15)) / 2, (5 - 1j * np.sqrt(15)) / 2]
    assert _close_sets(rep.roots, want, 1e-10)


def test_every_context_has_report():
    p = SimilarityParams(Fraction(1, 9))
    for ctx in CONTEXTS:
        rep = char_exponents(ctx, p)
        assert rep.bundle_dimension >= rep.admissible_count
        d = rep.to_dict()
        assert d["context"] == ctx and len(d["roots"]) == len(rep.roots)


def test_tail_counts_on_alpha_grid():
    for a in np.linspace(0, 0.25, 52)[1:-1]:
        p = SimilarityParams(a)
        assert char_exponents("WkbjBlowupTail", p).admissible_count == 3
        assert char_exponents("WkbjGlobalTail", p).admissible_count == 2


def test_interface_balance_n14_sympy():
    r, K, z0 = sp.symbols("r K z0")
    term = interface_expansion("N14", z0=2.0)
    g = K * r**4
    # z = z0 - r, so d/dz = -d/dr
    gz = -sp.diff(g, r)
    quad = sp.diff(g * gz, r, 4)
    lin = -gz * z0 / 5
    lead = sp.expand(quad - lin).coeff(r, 3).subs({K: term.coefficient, z0: 2.0})
    assert abs(float(lead)) < 1e-14
    assert term.balance_residual < 1e-14


def test_interface_quintic_compacton():
    t = interface_expansion("CompactonQuintic")
    assert t.coefficient == pytest.approx((2 / 1680) ** 2)
    with pytest.raises(ValueError):
        interface_expansion("N23")


def test_tail_fit_recovers_synthetic_tail():
    z = np.linspace(-120, -5, 6000)
    p_true, q_true, a_true = -0.625, 1.25, 0.535
    r = -z
    g = 1 + r**p_true * (0.3 * np.sin(a_true * r**q_true) + 0.1 * np.cos(a_true * r**q_true))
    jets = np.column_stack([g] + [np.zeros_like(z)] * 4)
    prof = Profile("N50", SimilarityParams(), z, jets, {"source": "synthetic"})
    fit = fit_oscillatory_tail(prof, (-100, -20))
    assert fit.envelope_exponent == pytest.approx(p_true, abs=1e-6)
    assert fit.phase_exponent == pytest.approx(q_true, abs=1e-6)
    assert fit.a0 == pytest.approx(a_true, abs=1e-6)
    assert fit.amplitude_sq == pytest.approx(0.1, rel=1e-5)
