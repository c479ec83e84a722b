"""Structured report fragments, consistency checks and DOT output.

Every builder returns plain dicts and lists (JSON-ready, insertion ordered)
so text, JSON and DOT renderings are deterministic.
"""

from __future__ import annotations

from .bdivisor import (
    All,
    AtPoint,
    SingularLocusOfD,
    SmoothLocusOfD,
    delta_by_node,
    delta_divisor,
    integral,
    is_nef_probe,
    partial_discrepancy_at,
    pullback_system,
)
from .bounds import (
    default_lefschetz_polynomial,
    hom_irr_bound_check,
    lefschetz_count,
    recognition_bound,
    slope_bound_certificate,
    turning_count_bound,
    turning_criterion,
)
from .charcycle import (
    cc_connection,
    cc_structure_sheaf,
    chi_routes,
    euler_of_cycle,
    local_solution_euler,
)
from .connection import ExpConnection, end_connection, irr_along, irr_data, turning_locus
from .scenario import Scenario
from .valtree import DivValuation, evaluate, probe_valuations


def _num(x):
    return x if isinstance(x, int) else str(x)


def irr_section(M: ExpConnection, max_blowups: int) -> dict:
    data = irr_data(M, max_blowups)
    m = data.model
    return {
        "connection": M.name,
        "rank": M.rank,
        "irr_on_X": {k: _num(v) for k, v in data.irr.on_x().items()},
        "resolution_nodes": len(m),
        "resolution_depth": max((m.depth_of(n) for n in m.node_ids), default=0),
        "nodes": [
            {
                "id": n,
                "over": m.root_point_of(n) or m.root_of(n),
                "chain": str(m.chain_of(n)),
                "irr": _num(data.irr.divisor[n]),
                "irr_end": _num(data.irr_end.divisor[n]),
            }
            for n in m.node_ids
        ],
    }


def delta_section(M: ExpConnection, max_blowups: int) -> dict:
    data = irr_data(M, max_blowups)
    m = data.model
    d_irr = delta_by_node(data.irr)
    d_end = delta_by_node(data.irr_end)
    delta = delta_divisor(data.irr)
    pair = M.pair
    return {
        "connection": M.name,
        "nodes": [
            {"id": n, "over": m.root_point_of(n) or m.root_of(n), "delta": _num(d_irr[n]), "delta_end": _num(d_end[n])}
            for n in m.node_ids
        ],
        "point_integrals": {p: _num(integral(delta, AtPoint(p))) for p in pair.d_points},
        "integral_all": _num(integral(delta, All())),
        "integral_smooth_locus": _num(integral(delta, SmoothLocusOfD())),
        "integral_singular_locus": _num(integral(delta, SingularLocusOfD())),
    }


def turning_section(M: ExpConnection) -> dict:
    pair = M.pair
    pts = turning_locus(M)
    return {
        "connection": M.name,
        "points": [
            {"id": p.base, "d_singular": len(pair.d_branches_at(p.base)) == 2} for p in pts
        ],
    }


def cc_section(M: ExpConnection, max_blowups: int) -> dict:
    cyc = cc_connection(M, max_blowups)
    return {"connection": M.name, "cycle": cyc.to_dict(), "structure_sheaf": cc_structure_sheaf(M.pair).to_dict()}


def chi_section(M: ExpConnection, max_blowups: int) -> dict:
    a, b = chi_routes(M, max_blowups)
    return {"connection": M.name, "route_a": _num(a), "route_b": _num(b), "consistent": a == b}


def bounds_section(sc: Scenario, M: ExpConnection, divisor: str | None) -> dict:
    mb = sc.options.max_blowups
    out = {"connection": M.name, "reports": []}

    def add(rep):
        out["reports"].append(
            {
                "name": rep.name,
                "bound": _num(rep.bound_value),
                "attained": _num(rep.attained_value),
                "ok": rep.ok,
                "certificate": rep.certificate,
            }
        )

    add(turning_count_bound(M, mb))
    for other in sc.connections.values():
        rep = hom_irr_bound_check(M, other)
        rep.name = f"hom irregularity ({M.name}, {other.name})"
        add(rep)
    rep = hom_irr_bound_check(M, end_connection(M))
    rep.name = f"hom irregularity ({M.name}, End({M.name}))"
    add(rep)
    for other in sc.connections.values():
        rep = recognition_bound(M, other, mb)
        rep.name = f"recognition obstruction ({M.name}, {other.name})"
        add(rep)
    if divisor is not None:
        add(slope_bound_certificate(M, sc.divisor(divisor), 2, mb))
    L = default_lefschetz_polynomial(M.pair)
    R = irr_data(M, mb).irr.on_x()
    out["lefschetz"] = {
        "polynomial": str(L),
        "normative": False,
        "note": "heuristic default L(R,r) = |D^sing| + 3*fdeg(R)*r^2",
        "K": _num(lefschetz_count(L, R, M.rank)),
    }
    return out


def consistency_checks(sc: Scenario, M: ExpConnection) -> list[tuple[str, bool, str]]:
    """The structural identities, each as (name, passed, detail)."""
    mb, depth = sc.options.max_blowups, sc.options.probe_depth
    pair = M.pair
    data = irr_data(M, mb)
    results = []

    a, b = chi_routes(M, mb)
    results.append(("two-route chi", a == b, f"{a} vs {b}"))

    eu = euler_of_cycle(pair, cc_connection(M, mb))
    bad = []
    if eu.on_U != M.rank:
        bad.append("U")
    for c in pair.d_curves:
        if eu.on_curve_stratum[c] != -irr_along(M, DivValuation.prime(c)):
            bad.append(c)
    for p in pair.d_points:
        if eu.on_point[p] != local_solution_euler(M, p, mb):
            bad.append(p)
    results.append(("euler function of CC", not bad, ", ".join(bad)))

    delta = delta_divisor(data.irr)
    results.append(("delta Irr effective", delta.is_effective(), ""))
    pb = pullback_system(pair, data.irr.on_x())
    probes = probe_valuations(data.model, depth, d_only=True)
    nonzero = [str(v) for v in probes if partial_discrepancy_at(pb, v)]
    results.append(("delta vanishes on pullbacks", not nonzero, ", ".join(nonzero[:3])))

    nef = is_nef_probe(data.irr, depth)
    results.append(("Irr nef (probe)", nef.ok, "" if nef.ok else str(nef.witness[1])))

    R = data.irr.on_x()
    over = [str(v) for v in probes if data.irr(v) > evaluate(R, v)]
    results.append(("Irr <= pullback of Irr(X)", not over, ", ".join(over[:3])))

    tl = {p.base for p in turning_locus(M)}
    mism = [p for p in pair.d_smooth_points if turning_criterion(M, p, mb) != (p in tl)]
    results.append(("turning criterion", not mism, ", ".join(mism)))

    results.append(("turning count bound", turning_count_bound(M, mb).ok, ""))
    for other in sc.connections.values():
        results.append((f"hom bound with {other.name}", hom_irr_bound_check(M, other).ok, ""))
        results.append((f"recognition bound with {other.name}", recognition_bound(M, other, mb).ok, ""))
    return results


def emit_dot(M: ExpConnection, max_blowups: int = 64) -> str:
    data = irr_data(M, max_blowups)
    m = data.model
    deltas = delta_by_node(data.irr)
    name = M.name.replace('"', "'")
    lines = [f'digraph "{name}" {{']
    if len(m):
        lines.append("  node [shape=box];")
    for n in m.node_ids:
        over = m.root_point_of(n) or m.root_of(n)
        label = f"{n}: irr={data.irr.divisor[n]}, δ={deltas[n]}"
        lines.append(f'  "{n}" [label="{label}", tooltip="over {over}"];')
    for n in m.node_ids:
        p = m.parent(n)
        if p is not None:
            lines.append(f'  "{p}" -> "{n}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "bounds_section",
    "cc_section",
    "chi_section",
    "consistency_checks",
    "delta_section",
    "emit_dot",
    "irr_section",
    "turning_section",
]
