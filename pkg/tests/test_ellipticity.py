import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cocycle_spectra import linalg2 as la
from cocycle_spectra.cocycle_spectrum import CocycleFamily, GOLDEN_ANGLE
from cocycle_spectra.ellipticity import (distance_to_rationals, perturb_diagonal,
                                         rotation_perturbation_derivative, search_semigroup,
                                         shyp_membership)
from cocycle_spectra.errors import BudgetExceeded, NotElliptic
from cocycle_spectra.skewproduct import word_product
from cocycle_spectra.symbolic import Word

from conftest import random_sl2


def recheck(fam, res):
    if res.elliptic_witness:
        w, m, rot = res.elliptic_witness
        fresh, _ = word_product(fam.mats, w)
        c = la.classify(fresh)
        assert c.tag == la.ELLIPTIC and c.rotation_number == rot
    if res.hyperbolic_witness:
        w, m = res.hyperbolic_witness
        fresh, _ = word_product(fam.mats, w)
        assert la.classify(fresh).tag == la.HYPERBOLIC and fresh == m


def test_two_rotations():
    fam = CocycleFamily((la.Mat2.rotation(1.0), la.Mat2.rotation(math.sqrt(2))))
    res = search_semigroup(fam, 10)
    assert str(res.elliptic_witness[0]) == "0"
    assert res.hyperbolic_witness is None and res.depth_searched == 10
    assert not shyp_membership(fam).member


def test_reference_family(ref_family):
    res = search_semigroup(ref_family, 8)
    recheck(ref_family, res)
    assert str(res.hyperbolic_witness[0]) == "0"
    assert str(res.elliptic_witness[0]) == "1"
    assert res.elliptic_witness[2] == pytest.approx(GOLDEN_ANGLE)


def test_generic_mixed_family_finds_elliptic_product():
    # neither generator is elliptic; a mixed product is
    a = la.Mat2.diag(1.5, 1 / 1.5)
    b = la.Mat2.rotation(0.9) @ la.Mat2.diag(1.2, 1 / 1.2) @ la.Mat2.rotation(-0.9)
    fam = CocycleFamily((a, b @ la.Mat2.rotation(1.3)))
    res = search_semigroup(fam, 10)
    recheck(fam, res)
    assert res.hyperbolic_witness is not None and res.elliptic_witness is not None


def test_identity_family():
    fam = CocycleFamily((la.Mat2.identity(), la.Mat2.identity()))
    res = search_semigroup(fam, 6)
    assert res.elliptic_witness is None and res.hyperbolic_witness is None


def test_search_limits(ref_family):
    with pytest.raises(ValueError):
        search_semigroup(ref_family, 15)
    with pytest.raises(BudgetExceeded):
        search_semigroup(ref_family, 12, budget=100)


def test_search_invariant_under_conjugation(rng, ref_family):
    for _ in range(5):
        c = random_sl2(rng)
        ci = c.inverse()
        conj = CocycleFamily(tuple(c @ m @ ci for m in ref_family.mats))
        a = search_semigroup(ref_family, 8)
        b = search_semigroup(conj, 8)
        assert a.elliptic_witness[0] == b.elliptic_witness[0]
        assert a.hyperbolic_witness[0] == b.hyperbolic_witness[0]
        assert b.hyperbolic_witness[1].trace == pytest.approx(a.hyperbolic_witness[1].trace, abs=1e-8)


def test_perturb_diagonal_examples():
    m = la.Mat2(2, 1, 3, 2)
    assert perturb_diagonal(m, 0.0) == m
    assert perturb_diagonal(la.Mat2.identity(), 1.0) == la.Mat2.diag(2, 0.5)
    with pytest.raises(ValueError):
        perturb_diagonal(m, -1.0)


def test_perturb_diagonal_keeps_fixed_direction():
    a1 = la.Mat2(2, 1, 0, 0.5)
    a2 = la.Mat2(1, 0.3, 0, 1)
    for t in (-0.3, 0.2, 1.5):
        a = a1 @ a1 @ perturb_diagonal(a2, t)
        assert a.c == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0.0, 2.0), st.floats(0, 2 * math.pi),
       st.floats(-0.5, 0.5))
def test_perturb_diagonal_det_and_lipschitz(a, s, b, t):
    e = math.exp(s)
    m = la.Mat2.rotation(a) @ la.Mat2.diag(e, 1 / e) @ la.Mat2.rotation(b)
    p = perturb_diagonal(m, t)
    assert abs(p.det - m.det) <= 1e-12 * max(1.0, m.sv_max ** 2)
    diff = la.Mat2(p.a - m.a, p.b - m.b, p.c - m.c, p.d - m.d)
    assert diff.sv_max <= 3 * abs(t) * m.sv_max


@pytest.mark.parametrize("theta", [0.3, 1.0, 2.5, -0.7])
def test_single_rotation_closed_form(theta):
    fam = CocycleFamily((la.Mat2.rotation(theta), la.Mat2.diag(2, 0.5)))
    d = rotation_perturbation_derivative(fam, Word((0,)), 1e-4)
    assert d == pytest.approx(-2 * math.sin(theta), abs=1e-6)


def test_richardson_refinement(ref_family, rng):
    w = Word((1, 1, 0, 1))
    assert la.classify(word_product(ref_family.mats, w)[0]).tag == la.ELLIPTIC
    h = 1e-3
    d1 = rotation_perturbation_derivative(ref_family, w, h)
    d2 = rotation_perturbation_derivative(ref_family, w, h / 2)
    assert abs(d1 - d2) <= 50 * h * h


def test_not_elliptic(ref_family):
    with pytest.raises(NotElliptic):
        rotation_perturbation_derivative(ref_family, Word((0,)), 1e-4)
    with pytest.raises(ValueError):
        rotation_perturbation_derivative(ref_family, Word((1,)), 0.1)


def test_distance_to_rationals():
    gap, p, q = distance_to_rationals(0.25)
    assert gap == 0.0 and (p, q) == (1, 4)
    gap, p, q = distance_to_rationals(1 / ((1 + math.sqrt(5)) / 2) ** 2)
    assert (p, q) == (5, 13) and gap > 1e-3


def test_shyp_membership(ref_family):
    rep = shyp_membership(ref_family)
    assert rep.member
    assert rep.to_dict()["heuristic"] is True
    rats = CocycleFamily((la.Mat2.diag(2, 0.5), la.Mat2.rotation(2 * math.pi / 5)))
    assert not shyp_membership(rats).member
    hyp = CocycleFamily((la.Mat2.diag(2, 0.5), la.Mat2.diag(3, 1 / 3)))
    rep = shyp_membership(hyp)
    assert not rep.member and "no elliptic witness" in rep.notes
