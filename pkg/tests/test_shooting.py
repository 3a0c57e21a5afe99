from fractions import Fraction

import numpy as np
import pytest

from nde5.errors import SameClassAtBracket
from nde5.models import SimilarityParams
from nde5.shooting import shoot_blowup, shoot_shock, shoot_time5, sweep_family, sweep_report_json


def test_shock_constant(n50_shot):
    assert n50_shot.value == pytest.approx(0.0692915, abs=1e-6)
    assert n50_shot.reliable_to <= -10
    tags = {str(c) for _, c in n50_shot.history}
    assert len(tags) >= 2


def test_shock_profile_starts_on_series(n50_shot):
    p = n50_shot.profile
    assert abs(p(0.0)) < 1e-12
    assert p(0.0, 1) == pytest.approx(-1.0, abs=1e-10)
    # far field oscillates about a positive level
    z = np.linspace(0.9 * n50_shot.reliable_to, 0.6 * n50_shot.reliable_to, 50)
    assert np.all(p(z) > 0)


def test_same_class_bracket_rejected():
    with pytest.raises(SameClassAtBracket):
        shoot_shock("N50", (0.5, 1.0), tol=1e-3)


def test_blowup_f3():
    res = shoot_blowup(SimilarityParams(Fraction(1, 9)), f1=-1.0, tol=1e-9)
    assert res.value == pytest.approx(0.0718010, abs=1e-6)
    assert res.profile.params.beta == 2 / 9


def test_time5_normalized_profile():
    p = shoot_time5(1.0, 0.0)
    assert p.provenance.get("far_field", 1.0) == pytest.approx(1.0)
    z = np.linspace(p.mesh.min(), 0, 400)
    g = p(z)
    assert abs(g[-1]) < 1e-8
    assert np.all(np.diff(g) <= 1e-12)
    assert g[0] == pytest.approx(1.0, abs=1e-3)


def test_sweep_edge_cases():
    assert sweep_family("Global", []) == []
    with pytest.raises(ValueError):
        sweep_family("Nope", [(1,)])


def test_sweep_records_failures():
    entries = sweep_family("Shock", [("N50", 0.5, 1.0)], tol=1e-3)
    assert entries[0].status == "failed"
    assert "SameClassAtBracket" in entries[0].error
    assert "failed" in sweep_report_json(entries)
