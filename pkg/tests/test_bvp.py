import numpy as np
import pytest

from nde5.bvp import BvpSpec, Conditions, make_mesh, solve_bvp, solve_global, uniform_profile
from nde5.models import NdeKind, SimilarityParams


def _exact(z, k):
    return np.array([1.0, -1.0, 2.0, -6.0, 24.0])[k] / (z + 2) ** (k + 1)


def manufactured_errors(cluster, ns=(64, 128, 256, 512)):
    """Errors for y''''' = -120 y^6 on [0, 2], exact solution 1/(z+2)."""
    errs = []
    for n in ns:
        spec = BvpSpec(
            lambda z, Y: np.vstack([Y[1:], -120 * Y[0:1] ** 6]),
            (0.0, 2.0),
            Conditions.fixed({k: _exact(0.0, k) for k in range(3)}),
            Conditions.fixed({k: _exact(2.0, k) for k in range(2)}),
            n=n,
            cluster=cluster,
            kappa=2.0,
            tol=1e-13,
        )
        sol = solve_bvp(spec, lambda z: np.column_stack([0.5 - z / 8] + [np.zeros_like(z)] * 4))
        errs.append(np.max(np.abs(sol.profile.g - _exact(sol.profile.mesh, 0))))
    return np.array(errs)


@pytest.mark.parametrize("cluster", [None, "right"])
def test_fourth_order_convergence(cluster):
    e = manufactured_errors(cluster)
    orders = np.log2(e[:-1] / e[1:])
    assert np.all(np.abs(orders - 4) < 0.5)


def test_mesh_nesting():
    a = make_mesh(-10, 0, 65)
    b = make_mesh(-10, 0, 129)
    assert np.allclose(b[::2], a, atol=1e-12)
    assert np.all(np.diff(a) > 0)


def test_spec_validation():
    left = Conditions.fixed({0: 1.0, 1: 0.0})
    with pytest.raises(ValueError):
        BvpSpec(lambda z, Y: Y, (1.0, 0.0), left, left)
    with pytest.raises(ValueError):
        BvpSpec(lambda z, Y: Y, (0.0, 1.0), left, left, n=10)
    with pytest.raises(ValueError):
        BvpSpec(lambda z, Y: Y, (0.0, 1.0), left, left)  # four conditions
    with pytest.raises(ValueError):
        Conditions.fixed({7: 1.0})


def test_polish_matches_shooting(n50_shot, n50_polished):
    z = np.linspace(-10, 0, 401)
    assert np.max(np.abs(n50_polished.profile(z) - n50_shot.profile(z))) < 1e-6
    assert n50_polished.profile.provenance["D"] == pytest.approx(n50_shot.value, abs=1e-7)


def test_global_solution_tail():
    sol = solve_global(SimilarityParams(1 / 9), 3.0, 0.0)
    p = sol.profile
    assert p(0.0) == pytest.approx(3.0)
    m = (p.mesh > -100) & (p.mesh < -20)
    slope = np.polyfit(np.log(-p.mesh[m]), np.log(np.abs(p.g[m])), 1)[0]
    assert slope == pytest.approx(0.5, abs=0.05)


def test_uniform_profile_levels():
    sol = uniform_profile(NdeKind.UniformNonDiv)
    p = sol.profile
    assert p(-55.0) == pytest.approx(1.0, abs=0.05)
    assert p(55.0) == pytest.approx(-1.0, abs=0.05)
    with pytest.raises(ValueError):
        uniform_profile(NdeKind.N50)
