"""The eight acceptance criteria, one test each.

Every test records a ``CRITERION n: PASS|FAIL`` line (printed immediately and
again in the terminal summary) before asserting.
"""

import random
import time

from bdiv_irr.bdivisor import (
    AtPoint,
    All,
    SmoothLocusOfD,
    check_multiplicity_estimate,
    delta_by_node,
    delta_divisor,
    integral,
    partial_discrepancy_at,
    pullback_system,
)
from bdiv_irr.bounds import hom_irr_bound_check, turning_count_bound, turning_criterion
from bdiv_irr.charcycle import (
    cc_connection,
    chi_routes,
    curve_gos,
    euler_of_cycle,
    fibration_chi,
    global_chi,
    index_pairing,
)
from bdiv_irr.connection import end_connection, irr_along, irr_data, turning_points_on_x
from bdiv_irr.geometry import DivisorOnX, euler_open_complement
from bdiv_irr.sampling import random_admissible_chain, random_chain, random_divisor, random_scenario
from bdiv_irr.valtree import DivValuation, evaluate, probe_valuations

N_RANDOM = 120


def _record(log, n, checks, elapsed, limit=None):
    failed = [name for name, ok in checks if not ok]
    if limit is not None and elapsed >= limit:
        failed.append(f"runtime {elapsed:.2f}s >= {limit}s")
    status = "PASS" if not failed else "FAIL"
    detail = f"{len(checks)} checks, {elapsed:.2f}s"
    if failed:
        detail += "; failed: " + ", ".join(failed[:5])
    line = f"CRITERION {n}: {status} ({detail})"
    print(line)
    log.append(line)
    return not failed


def _depths(model):
    out = {}
    for n in model.node_ids:
        p = model.root_point_of(n)
        out[p] = max(out.get(p, 0), model.depth_of(n))
    return out


def test_criterion_1_scen_a(scen_a, acceptance_log):
    irr_data.cache_clear()  # time a cold computation
    t0 = time.perf_counter()
    M = scen_a.connection("M")
    data = irr_data(M)
    a, b = chi_routes(M)
    # fibres: C* with e^{1/t} (one irregular puncture, one regular) over a C* base
    fibre = curve_gos(0, 2, 1, [1, 0])
    checks = [
        ("turning locus", turning_points_on_x(M) == ["Pxz", "Pyz"]),
        ("depth 2 at each", _depths(data.model) == {"Pxz": 2, "Pyz": 2}),
        ("delta Irr = 0", not delta_divisor(data.irr).support),
        ("Irr(X,M)", data.irr.on_x().coeffs == {"Lx": 1, "Ly": 1}),
        ("chi routes", a == b == 0),
        ("fibration oracle", fibre == -1 and fibration_chi(euler_open_complement(M.pair), fibre) == a),
    ]
    assert _record(acceptance_log, 1, checks, time.perf_counter() - t0, 1.0)


def test_criterion_2_scen_b(scen_b, acceptance_log):
    irr_data.cache_clear()  # time a cold computation
    t0 = time.perf_counter()
    M = scen_b.connection("M")
    W = delta_divisor(irr_data(M).irr)
    cc = cc_connection(M)
    a, b = chi_routes(M)
    # fibres e^{cb} on the affine line, over a base U = X minus D
    fibre = curve_gos(0, 1, 1, [1])
    checks = [
        ("turning points", turning_points_on_x(M) == ["Pxy", "Pxz"]),
        ("Pxy smooth, Pxz double", M.pair.d_smooth_points.count("Pxy") == 1 and "Pxz" in M.pair.d_double_points),
        ("delta at Pxy", integral(W, AtPoint("Pxy")) == 2),
        ("delta at Pxz", integral(W, AtPoint("Pxz")) == 0),
        ("CC point multiplicities", (cc.points.get("Pxy"), cc.points.get("Pxz")) == (2, 3)),
        ("chi routes", a == b == 0),
        ("fibration oracle", fibre == 0 and fibration_chi(euler_open_complement(M.pair), fibre) == a),
    ]
    assert _record(acceptance_log, 2, checks, time.perf_counter() - t0, 1.0)


def test_criterion_3_scen_c(scen_c, acceptance_log):
    irr_data.cache_clear()  # time a cold computation
    t0 = time.perf_counter()
    M = scen_c.connection("M")
    data = irr_data(M)
    W = delta_divisor(data.irr)
    a, b = chi_routes(M)
    fibre = curve_gos(0, 1, 1, [1])
    checks = [
        ("one turning point", turning_points_on_x(M) == ["Pxy"]),
        ("one blow-up", len(data.model) == 1),
        ("delta integral", integral(W, All()) == 1 and delta_by_node(data.irr) == {"E1": 1}),
        ("chi routes", a == b == 0),
        ("fibration oracle", fibration_chi(euler_open_complement(M.pair), fibre) == a),
    ]
    assert _record(acceptance_log, 3, checks, time.perf_counter() - t0, 1.0)


def test_criterion_4_two_routes(scen_a, scen_b, scen_c, acceptance_log):
    t0 = time.perf_counter()
    checks = []
    for sc in (scen_a, scen_b, scen_c):
        for name, M in sc.connections.items():
            checks.append((f"fixture {name}", global_chi(M) == index_pairing(M.pair, cc_connection(M))))
    for seed in range(N_RANDOM):
        M = random_scenario(random.Random(seed)).connection()
        checks.append((f"seed {seed}", global_chi(M) == index_pairing(M.pair, cc_connection(M))))
    assert _record(acceptance_log, 4, checks, time.perf_counter() - t0, 30.0)


def test_criterion_5_delta_calculus(acceptance_log):
    t0 = time.perf_counter()
    checks = []
    for seed in range(N_RANDOM):
        rng = random.Random(1000 + seed)
        sc = random_scenario(rng)
        pair = sc.surface
        M = sc.connection()
        Z = pullback_system(pair, random_divisor(rng, pair, effective=False))
        chains = [random_chain(rng, pair) for _ in range(5)]
        ok_pullback = all(partial_discrepancy_at(Z, DivValuation.exceptional(c)) == 0 for c in chains)
        checks.append((f"pullback {seed}", ok_pullback))

        data = irr_data(M)
        W = delta_divisor(data.irr)
        nodes = {data.model.valuation(n) for n in data.model.node_ids}
        checks.append((f"effective {seed}", W.is_effective() and set(W.support) <= nodes))

        R = data.irr.on_x()
        semi = all(irr_along(M, v) <= evaluate(R, v) for v in probe_valuations(data.model, 3))
        checks.append((f"semicontinuity {seed}", semi))
    assert _record(acceptance_log, 5, checks, time.perf_counter() - t0)


def test_criterion_6_multiplicity_estimate(acceptance_log):
    t0 = time.perf_counter()
    checks = []
    for seed in range(N_RANDOM):
        rng = random.Random(2000 + seed)
        pair = random_scenario(rng).surface
        if not pair.d_curves:
            continue
        R = random_divisor(rng, pair)
        Z = random_divisor(rng, pair)
        if not Z.support:
            Z = DivisorOnX({pair.d_curves[0]: 1})
        chain = random_admissible_chain(rng, pair, Z, max_len=6)
        checks.append((f"seed {seed}", chain.depth <= 6 and check_multiplicity_estimate(pair, R, Z, chain).ok))
    assert len(checks) >= 100
    assert _record(acceptance_log, 6, checks, time.perf_counter() - t0)


def test_criterion_7_bounds(scen_a, scen_b, scen_c, acceptance_log):
    t0 = time.perf_counter()
    checks = []
    for sc in (scen_a, scen_b, scen_c):
        Ms = list(sc.connections.values())
        for M1 in Ms:
            checks.append((f"hom {M1.name}/End", hom_irr_bound_check(M1, end_connection(M1)).ok))
            for M2 in Ms:
                checks.append((f"hom {M1.name}/{M2.name}", hom_irr_bound_check(M1, M2).ok))
    scenarios = [sc.connection("M") for sc in (scen_a, scen_b, scen_c)]
    scenarios += [random_scenario(random.Random(3000 + s)).connection() for s in range(N_RANDOM)]
    for i, M in enumerate(scenarios):
        tl = set(turning_points_on_x(M))
        agree = all(turning_criterion(M, p) == (p in tl) for p in M.pair.d_smooth_points)
        checks.append((f"criterion {i}", agree))
        checks.append((f"count {i}", turning_count_bound(M).ok))
    assert _record(acceptance_log, 7, checks, time.perf_counter() - t0)


def test_criterion_8_curve_oracle(scen_a, scen_b, scen_c, acceptance_log):
    t0 = time.perf_counter()
    checks = [
        ("C* with e^{1/t}", curve_gos(0, 2, 1, [1, 0]) == -1),
        ("A1 with e^t", curve_gos(0, 1, 1, [1]) == 0),
    ]
    # along a pole curve the Euler function of CC is the Euler characteristic
    # of the transversal punctured disc, i.e. curve_gos on C* with one regular end
    for sc in (scen_a, scen_b, scen_c):
        M = sc.connection("M")
        eu = euler_of_cycle(M.pair, cc_connection(M))
        for c in M.pair.d_curves:
            irr = irr_along(M, DivValuation.prime(c))
            checks.append((f"{c} stratum", eu.on_curve_stratum[c] == curve_gos(0, 2, M.rank, [irr, 0])))
    smooth = [
        integral(delta_divisor(irr_data(sc.connection("M")).irr), SmoothLocusOfD()) for sc in (scen_a, scen_b, scen_c)
    ]
    checks.append(("fixture smooth deltas", smooth == [0, 2, 1]))
    assert _record(acceptance_log, 8, checks, time.perf_counter() - t0)
