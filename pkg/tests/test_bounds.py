import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bdiv_irr.bounds import (
    Polynomial,
    default_lefschetz_polynomial,
    hom_irr_bound_check,
    lefschetz_count,
    recognition_bound,
    recognition_obstruction,
    slope_bound_certificate,
    turning_count_bound,
    turning_criterion,
)
from bdiv_irr.connection import end_connection, turning_points_on_x
from bdiv_irr.errors import PointNotSmoothOnD, SupportOffD, TurningOutsideZeroLocus
from bdiv_irr.geometry import DivisorOnX
from bdiv_irr.sampling import random_connection, random_scenario
from tests.helpers import conn, three_lines


def test_slope_bound_fixture(scen_b):
    rep = slope_bound_certificate(scen_b.connection("M"), scen_b.divisor("f"))
    # d * fdeg(2Lx) = 4, slope 2 along Lx against f = 2
    assert rep.bound_value == 4 and rep.attained_value == 1 and rep.ok
    assert not rep.certificate["failures"]


def test_slope_bound_regular():
    pair = three_lines(d=("Lx", "Lz"))
    rep = slope_bound_certificate(conn(pair, (None, 2)), DivisorOnX({"Lx": 1}))
    assert rep.bound_value == 0 and rep.attained_value == 0 and rep.ok


def test_slope_bound_rejects_bad_f(scen_b):
    M = scen_b.connection("M")
    with pytest.raises(TurningOutsideZeroLocus):
        slope_bound_certificate(M, scen_b.divisor("g"))
    with pytest.raises(SupportOffD):
        slope_bound_certificate(M, DivisorOnX({"Ly": 1}))
    with pytest.raises(ValueError):
        slope_bound_certificate(M, DivisorOnX({"Lx": -1}))


def test_hom_bound_fixtures(scen_a, scen_b, scen_c):
    for sc in (scen_a, scen_b, scen_c):
        Ms = list(sc.connections.values())
        for M1 in Ms:
            assert hom_irr_bound_check(M1, end_connection(M1)).ok
            for M2 in Ms:
                assert hom_irr_bound_check(M1, M2).ok
    rep = hom_irr_bound_check(scen_a.connection("M"), scen_a.connection("Mtwist"))
    assert rep.attained_value == 2 and rep.bound_value == 4


def test_turning_criterion_examples(scen_b, scen_c):
    assert turning_criterion(scen_b.connection("M"), "Pxy")
    assert turning_criterion(scen_c.connection("M"), "Pxy")
    assert not turning_criterion(scen_c.connection("M"), "Pyinf")
    pair = three_lines(d=("Lx",))
    assert not turning_criterion(conn(pair, ({"Lx": -2, "Lz": 1}, 1)), "Pxy")
    with pytest.raises(PointNotSmoothOnD):
        turning_criterion(scen_b.connection("M"), "Pxz")
    with pytest.raises(PointNotSmoothOnD):
        turning_criterion(scen_b.connection("M"), "nowhere")


def test_turning_count_examples(scen_a, scen_b):
    rep = turning_count_bound(scen_b.connection("M"))
    assert (rep.attained_value, rep.bound_value) == (2, 3) and rep.ok
    rep = turning_count_bound(scen_a.connection("M"))
    assert (rep.attained_value, rep.bound_value) == (2, 3) and rep.ok
    rep = turning_count_bound(conn(three_lines(), (None, 2)))
    assert rep.attained_value == 0 and rep.ok


def test_polynomial_arithmetic():
    x, r = Polynomial.var("Lx"), Polynomial.rank()
    p = (x + 1) * (x + 1) + 2 * r
    assert p(DivisorOnX({"Lx": 3}), 5) == 26
    assert p.degree() == 2
    assert str(Polynomial()) == "0"
    assert (r**2)(DivisorOnX(), 3) == 9


def test_lefschetz_examples(scen_b):
    pair = scen_b.surface
    L = default_lefschetz_polynomial(pair)
    assert lefschetz_count(L, DivisorOnX(), 1) == len(pair.d_double_points) + 1
    assert lefschetz_count(Polynomial.const(2), DivisorOnX({"Lx": 5}), 3) == 3
    F = Polynomial.fdeg(pair) ** 2
    # L(8R, 16) with R = Lx + Lz gives 16² = 256
    assert lefschetz_count(F, DivisorOnX({"Lx": 1, "Lz": 1}), 2) == 257


def test_recognition_examples(scen_a, scen_b):
    M = scen_b.connection("M")
    assert recognition_obstruction(M, M) == ["Pxz"]
    assert recognition_bound(M, M).ok
    pair = three_lines(d=("Lx", "Lz"))
    R = conn(pair, (None, 1))
    assert recognition_obstruction(R, R) == list(pair.d_double_points)
    A, T = scen_a.connection("M"), scen_a.connection("Mtwist")
    assert recognition_obstruction(A, T) == ["Pxy", "Pxz", "Pyz"]


seeds = st.integers(0, 100_000)


@given(seeds)
def test_turning_criterion_matches_locus(seed):
    M = random_scenario(random.Random(seed)).connection()
    tl = set(turning_points_on_x(M))
    for p in M.pair.d_smooth_points:
        assert turning_criterion(M, p) == (p in tl)


@given(seeds)
def test_turning_count_random(seed):
    assert turning_count_bound(random_scenario(random.Random(seed)).connection()).ok


@given(seeds)
def test_hom_bound_random(seed):
    rng = random.Random(seed)
    sc = random_scenario(rng)
    M1 = sc.connection()
    M2 = random_connection(rng, sc.surface)
    assert hom_irr_bound_check(M1, M2).ok


@given(seeds)
def test_slope_bound_random(seed):
    rng = random.Random(seed)
    M = random_scenario(rng).connection()
    f = DivisorOnX({c: 1 for c in M.pair.d_curves})
    if not f.support:
        return
    assert slope_bound_certificate(M, f, probe_depth=1).ok
