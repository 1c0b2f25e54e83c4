import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cocycle_spectra import linalg2 as la
from cocycle_spectra.errors import EmptyWord, NonPositiveDeterminant
from cocycle_spectra.skewproduct import (FiberSystem, exponent_field, finite_time_exponent,
                                         iterate, matrix_map, morse_smale, reference_fiber_system,
                                         rigid_rotation)
from cocycle_spectra.symbolic import Word

from conftest import random_words

words = st.lists(st.integers(0, 1), min_size=1, max_size=40).map(lambda s: Word(tuple(s)))


def test_reference_system_matches_cocycle(ref_system):
    fs = reference_fiber_system()
    for f, g in zip(fs.maps, ref_system.maps):
        assert f.matrix.allclose(g.matrix, atol=1e-15)


def test_morse_smale_fixed_points():
    for att, rep, c in [(0.0, 0.5, 0.25), (0.1, 0.7, 0.5), (0.9, 0.2, 0.05)]:
        f = morse_smale(att, rep, c)
        assert la.proj_distance(f.apply(att), att) < 1e-14
        assert la.proj_distance(f.apply(rep), rep) < 1e-14
        assert f.derivative(att) == pytest.approx(c)
        assert f.derivative(rep) == pytest.approx(1 / c)
        # everything else flows toward the attractor
        xs = np.linspace(0, 1, 50, endpoint=False)
        xs = xs[la.proj_distance(xs, rep) > 1e-3]
        for _ in range(200):
            xs = f.apply(xs)
        assert np.all(la.proj_distance(xs, att) < 1e-9)
        inv = f.inverse()
        assert inv.params == (rep, att, c)
    with pytest.raises(ValueError):
        morse_smale(0.1, 0.1, 0.5)
    with pytest.raises(ValueError):
        morse_smale(0.1, 0.6, 1.5)


def test_rotation_is_exact_shift():
    r = rigid_rotation(0.3)
    assert r.apply(0.8) == pytest.approx(0.1)
    assert r.derivative(0.2) == 1.0
    assert la.proj_distance(la.proj_apply(r.matrix, 0.8), 0.1) < 1e-14


def test_matrix_map_rejects_orientation_reversal():
    with pytest.raises(NonPositiveDeterminant):
        matrix_map(la.Mat2.diag(1.0, -1.0))
    assert matrix_map(la.Mat2.diag(4.0, 1.0)).matrix.is_sl2(1e-14)


@settings(max_examples=80, deadline=None)
@given(words, st.floats(0.0, 1.0, exclude_max=True))
def test_stepwise_orbit_matches_composite(w, x):
    sys = reference_fiber_system()
    orbit = iterate(sys, w, x)
    p, ls = sys.composite(w)
    assert la.proj_distance(orbit.points[-1], la.proj_apply(p, x)) < 1e-9
    direct = math.log(la.proj_derivative(p, x)) - 2 * ls
    assert orbit.log_deriv_sum == pytest.approx(direct, abs=1e-9 * len(w))


def test_exponent_field_extremes(ref_system, rng):
    for w in random_words(rng, 200, 30):
        mn, mx, arg = exponent_field(ref_system, w)
        p, ls = ref_system.composite(w)
        top = 2 * (math.log(p.sv_max) + ls) / len(w)
        assert mx == pytest.approx(top, abs=1e-9)
        assert mn == pytest.approx(-top, abs=1e-9)
        assert finite_time_exponent(ref_system, w, arg) == pytest.approx(mx, abs=1e-8)


def test_exponent_field_errors(ref_system):
    with pytest.raises(EmptyWord):
        exponent_field(ref_system, Word(()))
    with pytest.raises(EmptyWord):
        finite_time_exponent(ref_system, Word(()), 0.1)
    with pytest.raises(ValueError):
        exponent_field(ref_system, Word((0,)), grid=4)


def test_two_rotations_have_zero_exponents():
    sys = FiberSystem((rigid_rotation(0.1), rigid_rotation(0.37)))
    w = Word((0, 1, 1, 0, 1))
    assert exponent_field(sys, w)[:2] == pytest.approx((0.0, 0.0), abs=1e-12)
    assert finite_time_exponent(sys, w, 0.4) == 0.0


def test_long_word_does_not_overflow(ref_system):
    w = Word((0,) * 2000)
    mn, mx, arg = exponent_field(ref_system, w)
    assert mx == pytest.approx(2 * math.log(2), rel=1e-12)
    assert la.proj_distance(arg, 0.5) < 1e-9


def test_inverse_system_undoes(ref_system):
    inv = ref_system.inverse()
    w = Word((0, 1, 1, 0, 0, 1))
    x = iterate(ref_system, w, 0.123).points[-1]
    back = iterate(inv, w.reversed(), x).points[-1]
    assert la.proj_distance(back, 0.123) < 1e-10
