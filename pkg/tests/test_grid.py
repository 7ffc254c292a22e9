from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mslab.fieldio import dumps_field, loads_field, read_field, write_field
from mslab.grid import (ConfigError, Grid, SampledField, SpectralField, forward_transform,
                        inverse_transform, lp_norm, spectral_energy, trig_interpolate,
                        weak_lp_quasinorm)

from conftest import random_field


def test_grid_conventions():
    g = Grid(1, 8, 1.0)
    assert g.spacing == 0.125
    assert np.array_equal(g.axis_freqs(), np.arange(-4, 4))


def test_grid_2d_size():
    g = Grid(2, 16, 2.0)
    assert g.size == 256 and g.spacing == 0.125
    assert g.coords().shape == (16, 16, 2)


@pytest.mark.parametrize("args", [(1, 7, 1.0), (3, 8, 1.0), (1, 8, 0.0), (1, 4, 1.0)])
def test_grid_rejects_bad_config(args):
    with pytest.raises(ConfigError):
        Grid(*args)


def test_transform_of_constant():
    g = Grid(1, 16, 1.0)
    F = forward_transform(SampledField(g, np.ones(16)))
    c = F.coefficients
    assert c[8] == pytest.approx(1.0)
    assert np.allclose(np.delete(c, 8), 0, atol=1e-15)


def test_transform_of_character():
    g = Grid(1, 16, 1.0)
    x = g.axis_coords()
    c = forward_transform(SampledField(g, np.exp(2j * np.pi * x))).coefficients
    k = int(np.argmax(np.abs(c)))
    assert g.axis_freqs()[k] == 1
    assert c[k] == pytest.approx(1.0)
    assert np.sum(np.abs(c) > 1e-12) == 1


def test_inverse_of_delta():
    g = Grid(1, 8, 1.0)
    coef = np.zeros(8, complex)
    coef[4] = 1.0
    assert np.allclose(inverse_transform(SpectralField(g, coef)).values, 1.0)


@pytest.mark.parametrize("dim", [1, 2])
def test_roundtrip_and_linearity(dim):
    g = Grid(dim, 16, 3.0)
    f = random_field(g, 1, complex_=True)
    back = inverse_transform(forward_transform(f)).values
    assert np.linalg.norm(back - f.values) <= 1e-10 * np.linalg.norm(f.values)
    rng = np.random.default_rng(2)
    F = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    G = rng.standard_normal(g.shape)
    a, b = 2 - 1j, 0.5
    lhs = inverse_transform(SpectralField(g, a * F + b * G)).values
    rhs = a * inverse_transform(SpectralField(g, F)).values + b * inverse_transform(SpectralField(g, G)).values
    assert np.allclose(lhs, rhs, atol=1e-12, rtol=0)


def test_lp_norm_constants():
    g = Grid(1, 16, 1.0)
    for p in (0.5, 1.0, 2.0, 7.0):
        assert lp_norm(SampledField(g, np.full(16, -3.0)), p) == pytest.approx(3.0, rel=1e-13)
    two = SampledField(g, np.full(16, 2.0))
    three = SampledField(g, np.full(16, 3.0), nonnegative=True)
    assert lp_norm(two, 2, three) == pytest.approx(2 * np.sqrt(3), rel=1e-13)


@pytest.mark.parametrize("dim", [1, 2])
def test_parseval(dim):
    g = Grid(dim, 32, 5.0)
    f = random_field(g, 3, complex_=True)
    assert lp_norm(f, 2) ** 2 == pytest.approx(spectral_energy(forward_transform(f)), rel=1e-10)


def test_weak_norm_of_indicator():
    g = Grid(1, 64, 1.0)
    vals = np.zeros(64)
    vals[10:26] = 1.0
    for p in (0.7, 1.0, 3.0):
        assert weak_lp_quasinorm(SampledField(g, vals), p) == pytest.approx(0.25 ** (1 / p), rel=1e-12)
    assert weak_lp_quasinorm(SampledField(g, np.zeros(64)), 2.0) == 0.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), p=st.floats(0.3, 6.0))
def test_weak_below_strong(seed, p):
    g = Grid(1, 32, 2.0)
    f = random_field(g, seed)
    w = SampledField(g, np.random.default_rng(seed + 1).uniform(0.1, 3, 32), nonnegative=True)
    assert weak_lp_quasinorm(f, p, w) <= lp_norm(f, p, w) * (1 + 1e-12)


def test_nonnegative_tag_checked():
    g = Grid(1, 8, 1.0)
    with pytest.raises(ValueError):
        SampledField(g, -np.ones(8), nonnegative=True)


def test_trig_interpolate_exact_on_bandlimited():
    g = Grid(1, 16, 2.0)
    x = g.axis_coords()
    f = SampledField(g, np.cos(2 * np.pi * 3 * x / 2.0))
    fine = trig_interpolate(f, 4)
    xf = np.arange(64) * 2.0 / 64
    assert np.allclose(fine, np.cos(2 * np.pi * 3 * xf / 2.0), atol=1e-13)


@pytest.mark.parametrize("dim", [1, 2])
def test_field_file_roundtrip(tmp_path, dim):
    g = Grid(dim, 8, 1.5)
    f = random_field(g, 4, complex_=True)
    write_field(tmp_path / "f.bin", f)
    back = read_field(tmp_path / "f.bin")
    assert back.grid == g and np.array_equal(back.values, f.values)


def test_field_file_errors(tmp_path):
    blob = dumps_field(random_field(Grid(1, 8, 1.0)))
    with pytest.raises(ConfigError):
        loads_field(b"XXXX" + blob[4:])
    with pytest.raises(ConfigError):
        loads_field(blob[:-8])
    with pytest.raises(ConfigError):
        read_field(tmp_path / "missing.bin")
