from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mslab.grid import ConfigError, Grid, SampledField
from mslab.maximal import WindowFamily
from mslab.weights import (a1_characteristic, ap_characteristic, bmo_norm,
                           john_nirenberg_profile, multi_ap_characteristic, nu_weight,
                           openness_scan, power_weight)

ALL = WindowFamily("all_windows")


def const(g, c):
    return SampledField(g, np.full(g.shape, float(c)), nonnegative=True)


def test_power_weight_values():
    g = Grid(1, 64, 1.0)
    assert np.all(power_weight(0.0, 0.0, g).values == 1)
    w = power_weight(1.0, 0.0, g)
    assert w.values[16].real == pytest.approx(0.25)


@pytest.mark.parametrize("dim", [1, 2])
def test_constant_weights_exact(dim):
    g = Grid(dim, 16, 1.0)
    for c in (1.0, 4.0, 1e-3):
        assert ap_characteristic(const(g, c), 2.0) == 1.0
        assert ap_characteristic(const(g, c), 3.5) == 1.0
        assert a1_characteristic(const(g, c)) == 1.0
    assert multi_ap_characteristic([const(g, 1), const(g, 1)], [2, 2], 1.0) == 1.0
    assert multi_ap_characteristic([const(g, 4), const(g, 9)], [2, 2], 1.0) == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6), p=st.floats(1.2, 5.0), c=st.floats(1e-3, 1e3))
def test_ap_properties(seed, p, c):
    g = Grid(1, 32, 1.0)
    w = SampledField(g, np.random.default_rng(seed).uniform(0.1, 10, 32), nonnegative=True)
    val = ap_characteristic(w, p, ALL)
    assert val >= 1 - 1e-12
    assert ap_characteristic(SampledField(g, c * w.values, nonnegative=True), p, ALL) == pytest.approx(val, rel=1e-12)


def test_multi_reduces_to_ap():
    g = Grid(1, 64, 1.0)
    w = power_weight(-0.4, 0.5, g)
    for p, p0 in ((3.0, 1.0), (4.0, 2.0)):
        # one slot: the multiple-weight value is the A_{p/p0} value to the power p0/p
        multi = multi_ap_characteristic([w], [p], p0)
        assert multi ** (p / p0) == pytest.approx(ap_characteristic(w, p / p0), rel=1e-12)


def test_power_weight_growth_toward_boundary():
    g = Grid(1, 256, 1.0)
    vals = [a1_characteristic(power_weight(a, 0.5, g), ALL) for a in (-0.2, -0.5, -0.8, -0.95, -0.99)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 2 * vals[1]
    fine = a1_characteristic(power_weight(-0.5, 0.5, g.refined()), ALL)
    assert fine == pytest.approx(vals[1], rel=0.05)


def test_nu_weight():
    g = Grid(1, 16, 1.0)
    assert np.allclose(nu_weight([const(g, 1), const(g, 1)], [2, 2]).values, 1)
    assert np.allclose(nu_weight([const(g, 4), const(g, 9)], [2, 2]).values, 6)
    w = power_weight(-0.3, 0.5, g)
    bigger = SampledField(g, w.values * 1.5, nonnegative=True)
    assert np.all(nu_weight([bigger, const(g, 2)], [2, 3]).values.real
                  > nu_weight([w, const(g, 2)], [2, 3]).values.real)


def test_weights_must_be_positive():
    g = Grid(1, 16, 1.0)
    with pytest.raises(ConfigError):
        ap_characteristic(SampledField(g, np.zeros(16)), 2.0)
    with pytest.raises(ConfigError):
        a1_characteristic(const(g, 1), ALL) and ap_characteristic(const(g, 1), 1.0)


def test_openness_scan():
    g = Grid(1, 64, 1.0)
    w = power_weight(-0.5, 0.5, g)
    out = openness_scan([w, w], [4.0, 4.0], 1.0, [1.0, 2.0, 4.0, 5.0])
    assert out["scan"][-1]["characteristic"] is None
    assert out["largest_q"] == 4.0


def test_bmo_norm():
    g = Grid(1, 64, 1.0)
    assert bmo_norm(const(g, 3.0)) == 0
    rng = np.random.default_rng(0)
    b = SampledField(g, rng.standard_normal(64))
    assert bmo_norm(SampledField(g, b.values + 7.0)) == pytest.approx(bmo_norm(b), abs=1e-12)
    vals = []
    for n in (256, 512):
        gg = Grid(1, n, 1.0)
        x = gg.axis_coords()
        vals.append(bmo_norm(SampledField(gg, np.log(np.maximum(np.abs(x - 0.5), gg.spacing / 2))),
                             WindowFamily("dyadic")))
    assert np.isfinite(vals[0]) and abs(vals[1] / vals[0] - 1) < 0.1


def test_john_nirenberg():
    g = Grid(1, 256, 1.0)
    flat = john_nirenberg_profile(const(g, 2.0), WindowFamily("dyadic"))
    assert np.all(flat.curve == 0) and flat.degenerate
    x = g.axis_coords()
    b = SampledField(g, np.log(np.maximum(np.abs(x - 0.5), g.spacing / 2)))
    W = WindowFamily("dyadic")
    prof = john_nirenberg_profile(b, W)
    assert prof.rate > 0
    assert np.all(np.diff(prof.curve) <= 0)
    lam = np.linspace(0, 3, 13)
    twice = john_nirenberg_profile(SampledField(g, 2 * b.values), W, levels=2 * lam)
    once = john_nirenberg_profile(b, W, levels=lam)
    assert np.array_equal(twice.curve, once.curve)
