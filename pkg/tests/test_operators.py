from __future__ import annotations

import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mslab.exponents import TQuad
from mslab.grid import ConfigError, Grid, SampledField, lp_norm
from mslab.operators import (apply_bilinear_fixed_t, apply_unilinear_fixed_t, commutator_multiplier,
                             commutator_square, square_identity_check, square_kernel,
                             square_multiplier)
from mslab.symbols import builtin_symbol, parse_symbol

from conftest import bandlimited, random_field

GAUSS = builtin_symbol("gauss_bump")
ZERO = builtin_symbol("zero")
ONE = builtin_symbol("one")


def rel(a, b):
    return np.linalg.norm(np.ravel(a - b)) / np.linalg.norm(np.ravel(b))


@pytest.mark.parametrize("dim", [1, 2])
def test_bilinear_identity_symbol_gives_product(dim):
    g = Grid(dim, 16, 4.0)
    f1, f2 = random_field(g, 1, True), random_field(g, 2, True)
    for t in (0.1, 1.0, 7.0):
        out = apply_bilinear_fixed_t(ONE, t, f1, f2).values
        assert np.allclose(out, f1.values * f2.values, atol=1e-10, rtol=0)


def test_bilinear_zero_and_linearity():
    g = Grid(1, 32, 4.0)
    f1, f2, h = random_field(g, 1), random_field(g, 2), random_field(g, 3)
    assert np.all(apply_bilinear_fixed_t(ZERO, 1.0, f1, f2).values == 0)
    a, b = 1.5 - 2j, -0.25
    lhs = apply_bilinear_fixed_t(GAUSS, 0.7, SampledField(g, a * f1.values + b * h.values), f2).values
    rhs = (a * apply_bilinear_fixed_t(GAUSS, 0.7, f1, f2).values
           + b * apply_bilinear_fixed_t(GAUSS, 0.7, h, f2).values)
    assert np.allclose(lhs, rhs, atol=1e-12, rtol=0)


def test_unilinear_fixed_t_character():
    g = Grid(1, 32, 4.0)
    x = g.axis_coords()
    f = SampledField(g, np.exp(2j * np.pi * 3 * x / 4.0))
    m = builtin_symbol("unilinear_gauss")
    xi = 3 / 4.0 * 0.5
    out = apply_unilinear_fixed_t(m, 0.5, f).values
    assert np.allclose(out, xi**2 * np.exp(-xi**2) * f.values, atol=1e-13)


def test_square_multiplier_trivial():
    g = Grid(1, 32, 4.0)
    f1, f2 = random_field(g, 1), random_field(g, 2)
    assert np.all(square_multiplier(ZERO, [f1, f2]).values == 0)
    assert np.all(square_multiplier(GAUSS, [SampledField(g, np.zeros(32)), f2]).values == 0)


def test_plancherel_constant():
    # int_0^inf |m(t xi)|^2 dt/t = int s^3 exp(-2 s^2) ds = 1/8 for every xi != 0
    m = builtin_symbol("unilinear_gauss")
    g = Grid(1, 256, 16.0)
    q = TQuad(2**-10, 2**10, 8)
    for seed in range(3):
        f = bandlimited(g, seed, degree=20)
        ratio = lp_norm(square_multiplier(m, [f], q), 2) / lp_norm(f, 2)
        assert ratio == pytest.approx(np.sqrt(1 / 8), rel=1e-6)


def test_origin_warning():
    g = Grid(1, 16, 4.0)
    f = random_field(g, 0)
    with pytest.warns(RuntimeWarning):
        square_multiplier(ONE, [f, f], TQuad(0.5, 2.0, 2))


def test_kernel_matches_multiplier_dim1():
    g = Grid(1, 32, 8.0)
    f1, f2 = bandlimited(g, 1, 3), bandlimited(g, 2, 3)
    q = TQuad(g.spacing / 4, 4 * g.length, 4)
    a = square_multiplier(GAUSS, [f1, f2], q).values
    b = square_kernel(GAUSS, [f1, f2], q).values
    assert rel(b, a) < 1e-6


def test_kernel_matches_multiplier_unilinear_dim2():
    g = Grid(2, 16, 4.0)
    f = random_field(g, 5)
    q = TQuad(0.1, 8.0, 2)
    m = builtin_symbol("unilinear_gauss")
    assert rel(square_kernel(m, [f], q).values, square_multiplier(m, [f], q).values) < 1e-6


def test_kernel_homogeneity_and_zero():
    g = Grid(1, 16, 4.0)
    f1, f2 = random_field(g, 1), random_field(g, 2)
    q = TQuad(0.1, 4.0, 2)
    base = square_kernel(GAUSS, [f1, f2], q).values
    scaled = square_kernel(GAUSS, [SampledField(g, (-2 + 1j) * f1.values), f2], q).values
    assert np.allclose(scaled, np.sqrt(5) * base, atol=1e-12, rtol=1e-12)
    assert np.all(square_kernel(ZERO, [f1, f2], q).values == 0)


def test_kernel_route_resource_guard():
    g = Grid(1, 32, 4.0)
    f = random_field(g, 1)
    with pytest.raises(ConfigError):
        square_kernel(GAUSS, [f, f], TQuad(0.01, 4.0, 4), max_cost=10)


def test_commutator_constant_b_vanishes():
    g = Grid(1, 32, 8.0)
    f1, f2 = random_field(g, 1), random_field(g, 2)
    b = SampledField(g, np.full(32, 3.7))
    q = TQuad(0.1, 8.0, 2)
    assert np.all(commutator_multiplier(GAUSS, [b, b], [f1, f2], q).values == 0)
    assert np.all(commutator_square(GAUSS, [b, b], [f1, f2], q).values == 0)


def test_commutator_routes_agree():
    g = Grid(1, 32, 8.0)
    f1, f2 = bandlimited(g, 1, 3), bandlimited(g, 2, 3)
    b = SampledField(g, np.sin(2 * np.pi * g.axis_coords() / 8.0))
    q = TQuad(g.spacing / 4, 4 * g.length, 4)
    a = commutator_multiplier(GAUSS, [b, None], [f1, f2], q).values
    k = commutator_square(GAUSS, [b, None], [f1, f2], q).values
    assert rel(k, a) < 1e-5


def test_commutator_slot_additivity_and_scaling():
    g = Grid(1, 32, 8.0)
    f1, f2 = random_field(g, 1), random_field(g, 2)
    b1 = SampledField(g, np.log(1 + g.axis_coords()))
    b2 = SampledField(g, np.cos(g.axis_coords()))
    q = TQuad(0.1, 8.0, 4)
    both = commutator_multiplier(GAUSS, [b1, b2], [f1, f2], q).values
    one = commutator_multiplier(GAUSS, [b1, None], [f1, f2], q).values
    two = commutator_multiplier(GAUSS, [None, b2], [f1, f2], q).values
    assert np.allclose(both, one + two, atol=1e-12, rtol=0)
    dbl = commutator_multiplier(GAUSS, [SampledField(g, 2 * b1.values), None], [f1, f2], q).values
    assert np.allclose(dbl, 2 * one, atol=1e-12, rtol=1e-12)


@settings(max_examples=5, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_square_identity(seed):
    g = Grid(1, 16, 8.0)
    f1, f2 = random_field(g, seed, True), random_field(g, seed + 1, True)
    assert square_identity_check(GAUSS, f1, f2, TQuad(0.1, 16.0, 4)) < 1e-8


def test_square_identity_trivial():
    g = Grid(1, 16, 8.0)
    f = random_field(g, 0)
    z = SampledField(g, np.zeros(16))
    assert square_identity_check(GAUSS, z, f) == 0
    assert square_identity_check(ZERO, f, f) == 0
    with pytest.raises(ConfigError):
        square_identity_check(GAUSS, random_field(Grid(1, 64, 8.0)), random_field(Grid(1, 64, 8.0)))


def test_arity_mismatch():
    g = Grid(1, 16, 4.0)
    with pytest.raises(ConfigError):
        square_multiplier(GAUSS, [random_field(g)])
