import numpy as np
import pytest
import sympy as sp

from nde5.compactons import (
    CompactonProfile,
    explicit_compacton,
    interface_orbit,
    phi_component,
    robustness_probe,
    tw_residual,
)
from nde5.errors import NoOscillation

y = sp.symbols("y")


def test_k22_sympy_oracle():
    f = sp.Rational(4, 3) * sp.cos(y / 4) ** 2
    assert sp.simplify(f - sp.diff(f**2, y, 2) - f**2) == 0


def test_quintic_sympy_oracle():
    f = sp.cos(y / 2) ** 4 / 105
    expr = f - sp.diff(f**2, y, 4) - 25 * sp.diff(f**2, y, 2) - 144 * f**2
    assert sp.simplify(sp.expand(sp.expand_trig(expr))) == 0


@pytest.mark.parametrize("which", ["K22", "Quintic"])
def test_explicit_residuals(which):
    p = explicit_compacton(which)
    yy = np.linspace(-0.999 * p.y0, 0.999 * p.y0, 1001)
    assert np.max(np.abs(tw_residual(which, yy))) < 1e-12


def test_explicit_profile_shape():
    p = explicit_compacton("K22")
    assert p(0.0) == pytest.approx(4 / 3)
    assert p(7.0) == 0.0 and p(-7.0) == 0.0
    assert p(1.0, 1) == pytest.approx(-p(-1.0, 1))
    assert p.to_csv().startswith("y,F,f\n")
    with pytest.raises(ValueError):
        explicit_compacton("K33")


def test_interface_orbit():
    orb = interface_orbit()
    assert orb.period == pytest.approx(0.98250580, abs=1e-6)
    assert orb.amplitude == pytest.approx(0.07325, abs=5e-4)
    # periodic: the orbit map returns to the same state
    assert np.allclose(orb(0.3), orb(0.3 + orb.period), atol=1e-8)


def test_branch1_compacton(compacton_branch1):
    p = compacton_branch1
    assert p.y0 == pytest.approx(10.862854617, abs=1e-6)
    assert p.meta["humps"] == 1
    assert p.oscillation["sign_changes"] >= 3
    assert p.oscillation["envelope_exponent"] == pytest.approx(8.0, abs=0.3)


def test_phi_component_periodic(compacton_branch1):
    ph = phi_component(compacton_branch1)
    assert ph.period == pytest.approx(interface_orbit().period, rel=1e-5)
    assert ph.defect < 1e-5


def test_phi_component_needs_oscillation():
    yy = np.linspace(0.0, 2.0, 4001)
    prof = CompactonProfile("positive", 2.0, 8.0, yy, (2.0 - yy) ** 8)
    with pytest.raises(NoOscillation):
        phi_component(prof)


def test_robustness_probe():
    rep = robustness_probe(eps=(0.0, 1e-1))
    tol = rep.tol
    assert rep.case("fifth-order").min_defect > 1e3 * tol
    third = rep.case("third-order")
    assert third.min_defect < tol
    assert third.argmin_y0 == pytest.approx(2 * np.pi, abs=1e-6)
    tuned = rep.case("tuned-quintic[0]")
    assert tuned.min_defect < tol and tuned.argmin_y0 == pytest.approx(np.pi, abs=1e-6)
    assert rep.case("tuned-quintic[0.1]").min_defect > tol
    with pytest.raises(KeyError):
        rep.case("missing")
