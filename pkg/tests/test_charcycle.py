import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bdiv_irr.charcycle import (
    ConstructibleFunction,
    LagrangianCycle,
    cc_connection,
    cc_sol_restricted,
    cc_structure_sheaf,
    curve_gos,
    cycle_from_euler,
    euler_of_cycle,
    global_chi,
    index_pairing,
    lc_cycle,
    local_solution_euler,
)
from bdiv_irr.connection import irr_along, irr_data
from bdiv_irr.errors import PointOffD, SupportOffD, ValidationError
from bdiv_irr.geometry import DivisorOnX, euler_open_complement
from bdiv_irr.sampling import random_connection, random_pair, random_scenario
from bdiv_irr.valtree import DivValuation
from tests.helpers import conn, three_lines


def test_lc_cycle_examples():
    pair = three_lines(d=("Lx", "Lz"))
    assert lc_cycle(pair, DivisorOnX()).is_zero()
    c = lc_cycle(pair, DivisorOnX({"Lx": 2, "Lz": 3}))
    assert c == LagrangianCycle(0, {"Lx": 2, "Lz": 3}, {"Pxz": 5})
    assert lc_cycle(pair, DivisorOnX({"Lx": 1})) == LagrangianCycle(0, {"Lx": 1}, {"Pxz": 1})
    with pytest.raises(SupportOffD):
        lc_cycle(pair, DivisorOnX({"Ly": 1}))


def test_euler_of_basic_cycles():
    pair = three_lines(d=("Lx", "Lz"))
    eu = euler_of_cycle(pair, LagrangianCycle(1))
    assert eu.on_U == 1 and set(eu.on_curve_stratum.values()) == {1} and set(eu.on_point.values()) == {1}
    eu = euler_of_cycle(pair, lc_cycle(pair, DivisorOnX({"Lx": 2, "Lz": 3})))
    assert eu.on_U == 0 and eu.on_curve_stratum == {"Lx": -2, "Lz": -3}
    assert eu.on_point["Pxz"] == 0
    # a smooth marked point of D carries the curve value
    assert eu.on_point["Pxy"] == -2


cycles = st.builds(
    lambda z, a, b, p, q, r: LagrangianCycle(z, {"Lx": a, "Lz": b}, {"Pxz": p, "Pxy": q, "Pyz": r}),
    *[st.integers(-6, 6)] * 6,
)


@given(cycles)
def test_euler_inversion(cycle):
    pair = three_lines(d=("Lx", "Lz"))
    assert cycle_from_euler(pair, euler_of_cycle(pair, cycle)) == cycle


@given(cycles, cycles, st.integers(-3, 3))
def test_index_pairing_linear_and_closed_form(c1, c2, k):
    pair = three_lines(d=("Lx", "Lz"))
    assert index_pairing(pair, c1 + c2 * k) == index_pairing(pair, c1) + k * index_pairing(pair, c2)
    closed = c1.zero_section * pair.chi_top
    closed -= sum(m * (2 - 2 * pair.curve[c].genus) for c, m in c1.curves.items())
    closed += sum(c1.points.values())
    assert index_pairing(pair, c1) == closed


def test_structure_sheaf_cycle():
    one_line = three_lines(d=("Lx",))
    assert cc_structure_sheaf(one_line) == LagrangianCycle(1, {"Lx": 1}, {})
    two = three_lines(d=("Lx", "Lz"))
    assert cc_structure_sheaf(two) == LagrangianCycle(1, {"Lx": 1, "Lz": 1}, {"Pxz": 1})
    assert cc_structure_sheaf(three_lines(d=())) == LagrangianCycle(1)
    # derived from the Euler function of the constant sheaf on U extended by zero
    for pair in (one_line, two, three_lines()):
        f = ConstructibleFunction(1, {c: 0 for c in pair.d_curves}, {p: 0 for p in pair.d_points})
        assert cycle_from_euler(pair, f) == cc_structure_sheaf(pair)
        assert index_pairing(pair, cc_structure_sheaf(pair)) == euler_open_complement(pair)


def test_cc_connection_fixtures(scen_b, scen_c):
    assert cc_connection(scen_c.connection("M")) == LagrangianCycle(
        1, {"Lx": 2, "Linf": 1}, {"Pxinf": 2, "Pxy": 1}
    )
    assert cc_connection(scen_b.connection("M")) == LagrangianCycle(1, {"Lx": 3, "Lz": 1}, {"Pxz": 3, "Pxy": 2})
    pair = three_lines(d=("Lx", "Lz"))
    assert cc_connection(conn(pair, (None, 3))) == cc_structure_sheaf(pair) * 3


def test_index_pairing_examples(scen_c):
    pair = three_lines(d=("Lx", "Lz"))
    assert index_pairing(pair, cc_structure_sheaf(pair)) == 0
    assert index_pairing(scen_c.surface, cc_connection(scen_c.connection("M"))) == 0
    assert index_pairing(pair, LagrangianCycle()) == 0


def test_local_solution_euler(scen_b):
    M = scen_b.connection("M")
    assert local_solution_euler(M, "Pxy") == 0
    assert local_solution_euler(M, "Pxz") == 0
    with pytest.raises(PointOffD):
        local_solution_euler(M, "nowhere")
    # Pyz lies on Lz only; M is good there and has no pole along Lz
    assert local_solution_euler(M, "Pyz") == -irr_along(M, DivValuation.prime("Lz"))
    pair = three_lines(d=("Lx",), extra_points=())
    N = conn(pair, ({"Lx": -2, "Lz": -0}, 1))
    with pytest.raises(PointOffD):
        local_solution_euler(N, "Pyz")
    assert local_solution_euler(N, "Pxz") == -2


def test_global_chi_fixtures(scen_a, scen_b, scen_c):
    for sc in (scen_a, scen_b, scen_c):
        assert global_chi(sc.connection("M")) == 0


def test_curve_gos():
    assert curve_gos(0, 2, 1, [1, 0]) == -1
    assert curve_gos(0, 1, 1, [1]) == 0
    assert curve_gos(0, 0, 4, []) == 8
    with pytest.raises(ValueError):
        curve_gos(0, 2, 1, [1])


def test_cc_sol_restricted(scen_b):
    M = scen_b.connection("M")
    got = cc_sol_restricted(M, DivisorOnX({"Lx": 1}))
    assert got == LagrangianCycle(0, {"Lx": 2}, {"Pxy": 2, "Pxz": 2})
    pair = three_lines(d=("Lx", "Lz"))
    assert cc_sol_restricted(conn(pair, (None, 2)), DivisorOnX({"Lx": 1, "Lz": 1})).is_zero()
    with pytest.raises(SupportOffD):
        cc_sol_restricted(M, DivisorOnX({"Ly": 1}))
    with pytest.raises(ValidationError):
        cc_sol_restricted(M, DivisorOnX({"Lx": 2}))


def _restricted_oracle(M, comps):
    """Cycle whose Euler function is Eu(CC(M)) on the strata inside Z, 0 elsewhere."""
    pair = M.pair
    eu = euler_of_cycle(pair, cc_connection(M))
    on_curve = {c: (eu.on_curve_stratum[c] if c in comps else 0) for c in pair.d_curves}
    on_point = {
        p: (eu.on_point[p] if set(pair.point[p].on) & comps else 0) for p in pair.d_points
    }
    return cycle_from_euler(pair, ConstructibleFunction(0, on_curve, on_point))


@given(st.integers(0, 100_000))
def test_cc_sol_restricted_matches_euler_oracle(seed):
    rng = random.Random(seed)
    sc = random_scenario(rng)
    M = sc.connection()
    dcs = list(sc.surface.d_curves)
    comps = set(rng.sample(dcs, rng.randint(1, len(dcs))))
    got = cc_sol_restricted(M, DivisorOnX({c: 1 for c in comps}))
    assert got == _restricted_oracle(M, comps)


def test_cc_sol_restricted_to_d(scen_b):
    # with Z = D the difference from CC(M) is rank*CC(O) minus the D^sing
    # correction (which is absent here because Z^sm ∩ D^sing is empty)
    M = scen_b.connection("M")
    pair = M.pair
    full = cc_sol_restricted(M, DivisorOnX({c: 1 for c in pair.d_curves}))
    assert cc_connection(M) - full == cc_structure_sheaf(pair) * M.rank


@given(st.integers(0, 100_000))
def test_two_route_chi(seed):
    M = random_scenario(random.Random(seed)).connection()
    assert global_chi(M) == index_pairing(M.pair, cc_connection(M))


@given(st.integers(0, 100_000))
def test_euler_function_route(seed):
    M = random_scenario(random.Random(seed)).connection()
    pair = M.pair
    eu = euler_of_cycle(pair, cc_connection(M))
    assert eu.on_U == M.rank
    for c in pair.d_curves:
        assert eu.on_curve_stratum[c] == -irr_along(M, DivValuation.prime(c))
    for p in pair.d_points:
        assert eu.on_point[p] == local_solution_euler(M, p)


@given(st.integers(0, 100_000))
def test_rank_and_irr_determine_cc(seed):
    # relabelling the coefficient tags changes nothing the b-divisor sees
    rng = random.Random(seed)
    pair = random_pair(rng)
    M = random_connection(rng, pair)
    from bdiv_irr.connection import Combination, ExpConnection, ExpSummand

    def retag(value):
        return Combination.build({k: {"z" + t: n for t, n in tags} for k, tags in value.terms})

    N = ExpConnection(pair, tuple(ExpSummand(retag(s.value), s.rank) for s in M.summands), "N")
    assert irr_data(N).irr.divisor.coeffs == irr_data(M).irr.divisor.coeffs
    assert cc_connection(N) == cc_connection(M)
