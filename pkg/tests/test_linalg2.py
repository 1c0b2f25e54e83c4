import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cocycle_spectra import linalg2 as la
from cocycle_spectra._search import circle_extremes
from cocycle_spectra.errors import IsometryInput, NonPositiveDeterminant, SingularMatrix

from conftest import random_sl2

angles = st.floats(0.0, 2 * math.pi, allow_nan=False)
log_sv = st.floats(0.0, 3.0, allow_nan=False)


def sl2(a, s, b):
    e = math.exp(s)
    return la.Mat2.rotation(a) @ la.Mat2.diag(e, 1 / e) @ la.Mat2.rotation(b)


def test_singular_values_match_numpy(rng):
    for _ in range(200):
        arr = rng.normal(size=(2, 2))
        m = la.Mat2.from_array(arr)
        ref = np.linalg.svd(arr, compute_uv=False)
        assert m.sv_max == pytest.approx(ref[0], rel=1e-13)
        assert m.sv_min == pytest.approx(ref[1], rel=1e-12, abs=1e-15)


def test_diag_basics():
    m = la.Mat2.diag(2.0, 0.5)
    assert (m.sv_max, m.sv_min) == (2.0, 0.5)
    assert la.proj_derivative(m, 0.0) == pytest.approx(0.25)
    assert la.proj_derivative(m, 0.5) == pytest.approx(4.0)
    assert la.most_expanded_direction(m) == 0.0
    assert la.most_contracted_direction(m) == 0.5


def test_classify_tags():
    assert la.classify(la.Mat2.diag(2, 0.5)).tag == la.HYPERBOLIC
    c = la.classify(la.Mat2.rotation(0.3))
    assert c.tag == la.ELLIPTIC and c.rotation_number == pytest.approx(0.3)
    assert la.classify(la.Mat2(1, 1, 0, 1)).tag == la.PARABOLIC
    assert la.classify(la.Mat2.diag(2, 2)).tag == la.NOT_SL2
    with pytest.raises(ValueError):
        la.classify(la.Mat2.identity(), tol_det=0.0)


def test_inverse_and_errors():
    with pytest.raises(SingularMatrix):
        la.Mat2(1, 2, 2, 4).inverse()
    with pytest.raises(SingularMatrix):
        la.proj_apply(la.Mat2(1, 2, 2, 4), 0.1)
    with pytest.raises(NonPositiveDeterminant):
        la.normalize_glplus(la.Mat2.diag(1, -1))
    m = la.Mat2(3, 1, 2, 5)
    assert (m @ m.inverse()).allclose(la.Mat2.identity())
    assert la.normalize_glplus(m).det == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(angles, log_sv, angles, st.floats(0.0, 1.0, exclude_max=True))
def test_derivative_range_and_norm_symmetry(a, s, b, theta):
    m = sl2(a, s, b)
    d = la.proj_derivative(m, theta)
    n2 = m.sv_max ** 2
    assert n2 ** -1 * (1 - 1e-9) <= d <= n2 * (1 + 1e-9)
    assert m.inverse().sv_max == pytest.approx(m.sv_max, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(angles, log_sv, angles, st.floats(0.0, 1.0, exclude_max=True))
def test_apply_then_inverse(a, s, b, theta):
    m = sl2(a, s, b)
    back = la.proj_apply(m.inverse(), la.proj_apply(m, theta))
    assert la.proj_distance(back, theta) < 1e-9 * max(1.0, m.sv_max ** 4)


@settings(max_examples=100, deadline=None)
@given(angles, st.floats(0.05, 3.0), angles, st.floats(0.0, 1.0, exclude_max=True),
       st.floats(0.1, 10.0))
def test_glplus_derivative_is_scale_invariant(a, s, b, theta, k):
    m = sl2(a, s, b)
    assert la.proj_derivative(m.scaled(k), theta) == pytest.approx(la.proj_derivative(m, theta), rel=1e-12)


def test_derivative_extremes_on_grid(rng):
    for _ in range(50):
        m = random_sl2(rng)
        field = lambda x: la.proj_derivative(m, x)
        xmin, fmin, xmax, fmax = circle_extremes(field, grid=512)
        assert fmax[0] == pytest.approx(m.sv_max ** 2, abs=1e-9)
        assert fmin[0] == pytest.approx(m.sv_max ** -2, abs=1e-12)
        assert la.proj_distance(xmax[0], la.most_contracted_direction(m)) < 1e-6


def test_arc_membership():
    arc = la.Arc(0.9, 0.2)
    assert arc.contains(0.95) and arc.contains(0.05) and not arc.contains(0.2)
    assert arc.end == pytest.approx(0.1)
    assert arc.contains_arc(la.Arc(0.95, 0.1))
    assert not arc.contains_arc(la.Arc(0.95, 0.2))
    assert not arc.contains(0.9, interior=True)
    assert la.Arc.from_endpoints(0.9, 0.1).length == pytest.approx(0.2)


@settings(max_examples=200, deadline=None)
@given(angles, st.floats(0.05, 3.0), angles, st.floats(0.01, 50.0), st.floats(0.0, 1.0, exclude_max=True))
def test_small_derivative_interval_is_exact(a, s, b, delta, theta):
    m = sl2(a, s, b)
    arc = la.small_derivative_interval(m, delta)
    assert arc.length == pytest.approx(1 - la.normalized_arctan(delta), abs=1e-15)
    bound = la.small_derivative_threshold(m, delta)
    d = la.proj_derivative(m, theta)
    # points clearly off the boundary fall on the predicted side
    edge = min(la.proj_distance(theta, arc.start), la.proj_distance(theta, arc.end))
    if edge > 1e-7:
        assert bool(arc.contains(theta)) == (d <= bound)


def test_small_derivative_interval_limits():
    m = la.Mat2.diag(2, 0.5)
    assert la.small_derivative_interval(m, 1e-9).length == pytest.approx(1.0)
    assert la.small_derivative_interval(m, 1e9).length == pytest.approx(0.0, abs=1e-9)
    assert la.small_derivative_interval(m, 0.25).length == pytest.approx(0.84404, abs=1e-5)
    with pytest.raises(IsometryInput):
        la.small_derivative_interval(la.Mat2.rotation(0.4), 1.0)
    with pytest.raises(ValueError):
        la.small_derivative_interval(m, 0.0)


def test_batch_product_rescales_without_changing_direction():
    entries = la.stack_entries([la.Mat2.diag(1e3, 1e-3), la.Mat2.rotation(0.1)])
    words = np.zeros((1, 60), dtype=np.uint8)
    a, b, c, d, ls = la.batch_product(entries, words)
    assert ls[0] > 0
    assert math.log(la.singular_values(a, b, c, d)[0][0]) + ls[0] == pytest.approx(60 * math.log(1e3))


def test_wrap():
    assert la.wrap(-1e-18) in (0.0, 1.0 - 1e-18) and la.wrap(-1e-18) < 1.0
    assert la.wrap(1.25) == 0.25
    assert isinstance(la.wrap(0.3), float)
