from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from mslab.grid import ConfigError
from mslab.orlicz import (YoungFn, luxemburg_norm, luxemburg_norms, orlicz_holder_check, phi,
                          phi0, phi1, phi1_density, phibar1, phibar1_density, young_pair_check)


def test_phi_values():
    for a in (0.5, 1.0, 3.0):
        assert phi(1.0, a) == 1.0
    assert phi(math.e, 1.0) == pytest.approx(2 * math.e)
    assert phi(math.e**2, 2.0) == pytest.approx(9 * math.e**4)
    with pytest.raises(ConfigError):
        phi(-1.0, 1.0)


def test_phibar1_values():
    assert phibar1(1.0, 1.0) == pytest.approx(0.5)
    assert phibar1(2.0, 1.0) == pytest.approx(0.5 + math.e - 1, rel=1e-12)
    assert phibar1(0.0, 2.5) == 0.0
    assert phibar1(1e9, 1.0) == math.inf


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
def test_closed_forms_against_quadrature(alpha):
    for t in (0.3, 1.0, 1.7, 5.0, 40.0):
        want1 = quad(lambda s: phi1_density(s, alpha), 0, t, limit=200, points=[1.0] if t > 1 else None)[0]
        assert phi1(t, alpha) == pytest.approx(want1, rel=1e-9)
        want2 = quad(lambda s: phibar1_density(s, alpha), 0, t, limit=200, points=[1.0] if t > 1 else None)[0]
        assert phibar1(t, alpha) == pytest.approx(want2, rel=1e-9)


@pytest.mark.parametrize("kind", ["phi", "phi0", "phi1", "phibar1"])
def test_young_function_shape(kind):
    Y = YoungFn(kind, 1.5)
    t = np.linspace(0, 6, 601)
    v = Y(t)
    assert v[0] == 0 and np.all(np.diff(v) > 0)
    a, b = t[:-2:2], t[2::2]
    assert np.all(Y((a + b) / 2) <= (Y(a) + Y(b)) / 2 + 1e-12)


def test_young_equality_and_zero():
    for alpha in (1.0, 2.0):
        for s in (0.2, 1.0, 3.0, 25.0):
            chk = young_pair_check(s, phi1_density(s, alpha), alpha)
            rhs = phi1(s, alpha) + phibar1(phi1_density(s, alpha), alpha)
            assert chk.holds and abs(chk.slack) <= 1e-9 * rhs
        chk = young_pair_check(0.0, 1.7, alpha)
        assert chk.holds and chk.slack == pytest.approx(phibar1(1.7, alpha))


@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_young_sweep(alpha):
    rng = np.random.default_rng(int(alpha))
    s, t = rng.uniform(0, 100, size=(2, 200_000))
    assert young_pair_check(s, t, alpha).holds


def test_luxemburg_constants_and_zero():
    for alpha in (0.5, 1.0, 2.0):
        for c in (0.01, 1.0, 7.5):
            assert luxemburg_norm(np.full(10, c), YoungFn("phi", alpha)) == pytest.approx(c, rel=1e-8)
    assert luxemburg_norm(np.zeros(5), YoungFn("phi1", 1.0)) == 0.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6), kind=st.sampled_from(["phi", "phi1", "phibar1"]))
def test_luxemburg_homogeneity(seed, kind):
    f = np.random.default_rng(seed).exponential(size=16)
    Y = YoungFn(kind, 1.0)
    assert luxemburg_norm(2 * f, Y) == pytest.approx(2 * luxemburg_norm(f, Y), rel=1e-9)


def test_luxemburg_defining_equation():
    f = np.random.default_rng(3).exponential(size=(4, 32))
    Y = YoungFn("phi", 1.5)
    lam = luxemburg_norms(f, Y)
    for row, l in zip(f, lam):
        assert np.mean(Y(row / l)) == pytest.approx(1.0, rel=1e-8)


def test_holder_check():
    assert orlicz_holder_check(np.zeros(8), np.ones(8), 1.0).ratio == 0
    assert orlicz_holder_check(np.ones(8), np.ones(8), 1.0).ratio <= 1
    rng = np.random.default_rng(4)
    worst = max(orlicz_holder_check(rng.exponential(size=20), rng.exponential(size=20), a).ratio
                for a in (1.0, 2.0) for _ in range(200))
    assert worst <= 1 + 1e-9


def test_submultiplicative_and_sandwich():
    rng = np.random.default_rng(5)
    s, t = np.exp(rng.uniform(-10, 10, size=(2, 100_000)))
    for a in (1.0, 2.0):
        assert np.all(phi(s * t, a) <= phi(s, a) * phi(t, a) * (1 + 1e-12))
        grid = np.geomspace(1e-6, 1e6, 1000)
        p1, p0 = phi1(grid, a), phi0(grid, a)
        assert np.all(p1 <= p0 * (1 + 1e-12)) and np.all(p0 <= (1 + a) * p1 * (1 + 1e-12))
