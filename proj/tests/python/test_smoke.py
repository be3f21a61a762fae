import math

import pytest

import garchcp as g


def test_params_validation():
    p = g.GarchParams(1.0, 0.3, 0.4)
    assert p.unconditional_variance() == pytest.approx(1.0 / 0.3)
    with pytest.raises(ValueError):
        g.GarchParams(1.0, 0.6, 0.6)


def test_simulate_is_deterministic():
    p = g.GarchParams(1.0, 0.3, 0.4)
    a = g.simulate(p, 300, seed=5)
    b = g.simulate(p, 300, seed=5)
    assert a == b
    assert len(a) == 300
    c = g.simulate(p, 300, contamination=g.OutlierKind.ADDITIVE, p=0.01, s=10, seed=5)
    assert len(c) == 300


def test_fit_recovers_parameters():
    x = g.simulate(g.GarchParams(1.0, 0.3, 0.4), 3000, seed=2)
    q = g.fit(x)
    r = g.fit(x, gamma=0.1)
    for f in (q, r):
        assert f.converged
        assert abs(f.params.alpha - 0.3) < 0.1
        assert abs(f.params.beta - 0.4) < 0.15


def test_change_is_detected_and_located():
    base = g.GarchParams(1.0, 0.3, 0.4)
    x = g.simulate(base, 2000, change_at=0.5, post=g.GarchParams(3.0, 0.3, 0.4), seed=4)
    res = g.run_test(x, g.TestKind.SN_ROBUST, gamma=0.1, M=9)
    assert res.reject
    assert abs(res.k_hat - 1000) < 100
    seg = g.binary_segmentation(x)
    assert len(seg.change_points) == 1
    assert len(seg.segments) == 2


def test_limits():
    assert g.critical_value(g.LimitKind.SUP_BRIDGE, 0.05) == pytest.approx(1.358, abs=0.01)
    assert g.kolmogorov_cdf(1.35809863932255) == pytest.approx(0.95, abs=1e-12)
    q = g.simulate_limit(g.LimitKind.SUP_BRIDGE, grid_n=1000, reps=10000, seed=3)
    assert q[0.95] == pytest.approx(1.358, abs=0.03)


def test_building_blocks():
    assert g.truncate(20.0, 9.0) == 9.0
    assert g.truncate(4.0, 9.0) == 4.0
    assert g.cusum_process([1.0, 1.0, 1.0])[-1] == pytest.approx(0.0, abs=1e-12)
    t = g.cusum_test([0.0, 0.0, 1.0, 1.0])
    assert t.statistic == pytest.approx(1.0)
    assert t.k_hat == 2
    assert math.isfinite(g.sn_test([0.0, 1.0, 3.0, 2.0, 5.0]).statistic)
