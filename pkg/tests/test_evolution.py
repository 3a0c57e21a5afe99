import numpy as np
import pytest

from nde5.errors import BlowupDetected, SpectralTailRise
from nde5.evolution import EvolutionField, evolve, make_field, mollify, shock_indicator, spectral_tail, stable_dt


def test_field_validation():
    with pytest.raises(ValueError):
        EvolutionField(10.0, 100, np.zeros(100))
    with pytest.raises(ValueError):
        EvolutionField(10.0, 32, np.zeros(32))
    with pytest.raises(ValueError):
        EvolutionField(10.0, 64, np.zeros(65))


def test_indicator_trivial_fields():
    z = make_field(lambda x: 0 * x, L=np.pi, N=64)
    assert shock_indicator(z).max_gradient == 0.0
    s = make_field(np.sin, L=np.pi, N=64)
    assert shock_indicator(s).max_gradient == pytest.approx(1.0, abs=1e-12)


def test_mollified_step():
    f = mollify("S+", 3.0)
    assert np.max(np.abs(f.u)) <= 1.0 + 1e-12
    assert 1.5 <= f.meta["distance"] <= 3.0
    assert spectral_tail(f) < 1e-8
    ind = shock_indicator(f)
    assert ind.distance_splus < 3.0
    assert ind.distance_sminus == pytest.approx(4 * ind.window, rel=0.05)


def test_mollify_distances_monotone():
    d = [mollify("S-", delta).meta["distance"] for delta in (4.0, 2.0, 1.0, 0.5)]
    assert all(a > b for a, b in zip(d, d[1:]))
    with pytest.raises(ValueError):
        mollify("S+", 10.0)
    with pytest.raises(ValueError):
        mollify("S+", -1.0)


def test_smooth_samples_returned_unchanged():
    x = -50 + 100 * np.arange(256) / 256
    u = np.exp(-(x**2) / 50)
    f = mollify(u, 1.0)
    assert f.meta["mollified"] is False and np.array_equal(f.u, u)


def test_linear_mode_exact():
    L, N = 50.0, 256
    k = 8 * np.pi / L
    eps = 1e-6
    f = make_field(lambda x: eps * np.sin(k * x), L, N)
    t_end = 0.1
    out = evolve(f, "UniformDiv", t_end)[-1]
    exact = eps * np.sin(k * f.x - k**5 * t_end)
    # relative error with the u^2 terms scaled by eps^2
    assert np.max(np.abs(out.u - exact)) / eps < 1e-8


def test_mass_conservation():
    f = make_field(lambda x: 0.5 * np.exp(-(x**2) / 40) * np.cos(x / 4), 50.0, 256)
    dt = stable_dt(f)
    snaps = evolve(f, "UniformDiv", f.t + 1000 * dt, dt=dt)
    m0, m1 = np.sum(snaps[0].u), np.sum(snaps[-1].u)
    assert snaps[-1].meta["steps"] == 1000
    assert abs(m1 - m0) * (100.0 / 256) < 1e-10


def test_time_step_order():
    f = mollify("S+", 3.0)
    n0 = int(np.ceil(0.05 / stable_dt(f)))
    a, b, c = (evolve(f, "UniformNonDiv", 0.05, dt=0.05 / n)[-1].u for n in (n0, 2 * n0, 4 * n0))
    order = np.log2(np.max(np.abs(a - b)) / np.max(np.abs(b - c)))
    assert order == pytest.approx(4.0, abs=0.5)


def test_reality_and_reflection():
    f = make_field(lambda x: 0.05 * np.exp(-(x**2) / 30), 50.0, 128)
    a = evolve(f, "UniformNonDiv", 0.05)[-1]
    assert np.all(np.isreal(a.u))
    # x -> -x reverses the direction of time for an odd-order equation
    back = EvolutionField(a.L, a.N, np.roll(a.u[::-1], 1))
    b = evolve(back, "UniformNonDiv", 0.05)[-1]
    assert np.max(np.abs(np.roll(b.u[::-1], 1) - f.u)) < 1e-7


def test_preconditions():
    f = mollify("S+", 3.0)
    with pytest.raises(ValueError):
        evolve(f, "UniformNonDiv", 0.1, dt=1.0)
    with pytest.raises(ValueError):
        evolve(f, "N50", 0.1)
    rough = make_field(np.sign, 50.0, 256)
    with pytest.raises(ValueError):
        evolve(rough, "UniformNonDiv", 0.1)


def test_rarefaction_smooths():
    snaps = evolve(mollify("S+", 3.0), "UniformNonDiv", 0.1)
    g = [shock_indicator(s).max_gradient for s in snaps]
    assert g[-1] < g[0]


def test_resolution_guard():
    with pytest.raises(SpectralTailRise):
        evolve(mollify("S+", 3.0), "UniformNonDiv", 0.05, tail_limit=1e-12)
    assert issubclass(BlowupDetected, Exception)


def test_snapshots_cover_run():
    f = make_field(lambda x: 1e-3 * np.cos(x / 8), 8 * np.pi, 64)
    snaps = evolve(f, "UniformNonDiv", 1.0)
    assert len(snaps) == 5
    assert f.to_csv().startswith("x,u\n")
