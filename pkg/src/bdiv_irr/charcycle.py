"""Lagrangian cycles over (X, D), the Euler morphism and Euler characteristics.

Cycles are combinations of the zero section, conormals of the components of
D and conormals of marked points.  Constructible functions are taken with
respect to the stratification U = X - D, the open curve strata (a component
of D minus the marked points of D on it) and the marked points of D.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .bdivisor import AtPoint, All, delta_divisor, integral
from .connection import ExpConnection, irr_along, irr_data
from .errors import PointOffD, SupportOffD, ValidationError
from .geometry import DivisorOnX, Number, SurfacePair, euler_open_complement
from .valtree import DivValuation


def _clean(d: Mapping[str, Number]) -> dict[str, Number]:
    return {k: v for k, v in sorted(d.items()) if v}


@dataclass(frozen=True)
class LagrangianCycle:
    zero_section: Number = 0
    curves: Mapping[str, Number] = field(default_factory=dict)
    points: Mapping[str, Number] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "curves", _clean(self.curves))
        object.__setattr__(self, "points", _clean(self.points))

    def __add__(self, other: "LagrangianCycle") -> "LagrangianCycle":
        curves = dict(self.curves)
        for k, v in other.curves.items():
            curves[k] = curves.get(k, 0) + v
        points = dict(self.points)
        for k, v in other.points.items():
            points[k] = points.get(k, 0) + v
        return LagrangianCycle(self.zero_section + other.zero_section, curves, points)

    def __mul__(self, k: Number) -> "LagrangianCycle":
        return LagrangianCycle(
            k * self.zero_section,
            {c: k * v for c, v in self.curves.items()},
            {p: k * v for p, v in self.points.items()},
        )

    __rmul__ = __mul__

    def __neg__(self) -> "LagrangianCycle":
        return self * -1

    def __sub__(self, other: "LagrangianCycle") -> "LagrangianCycle":
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, LagrangianCycle):
            return NotImplemented
        return (self.zero_section, self.curves, self.points) == (
            other.zero_section,
            other.curves,
            other.points,
        )

    def __hash__(self):
        return hash((self.zero_section, tuple(self.curves.items()), tuple(self.points.items())))

    def is_zero(self) -> bool:
        return not self.zero_section and not self.curves and not self.points

    def to_dict(self) -> dict:
        return {"zero_section": self.zero_section, "curves": dict(self.curves), "points": dict(self.points)}


@dataclass(frozen=True)
class ConstructibleFunction:
    on_U: Number
    on_curve_stratum: Mapping[str, Number]
    on_point: Mapping[str, Number]


def _strata_points(pair: SurfacePair) -> tuple[str, ...]:
    return pair.d_points


def curve_stratum_euler(pair: SurfacePair, curve_id: str) -> int:
    """Compactly supported Euler characteristic of an open curve stratum."""
    removed = sum(1 for p in pair.d_points if curve_id in pair.point[p].on)
    return 2 - 2 * pair.curve[curve_id].genus - removed


def euler_of_cycle(pair: SurfacePair, cycle: LagrangianCycle) -> ConstructibleFunction:
    z = cycle.zero_section
    on_curve = {c: z - cycle.curves.get(c, 0) for c in pair.d_curves}
    on_point = {}
    for p in _strata_points(pair):
        val = z + cycle.points.get(p, 0)
        for c in pair.d_branches_at(p):
            val -= cycle.curves.get(c, 0)
        on_point[p] = val
    return ConstructibleFunction(z, on_curve, on_point)


def cycle_from_euler(pair: SurfacePair, f: ConstructibleFunction) -> LagrangianCycle:
    z = f.on_U
    curves = {c: z - f.on_curve_stratum.get(c, z) for c in pair.d_curves}
    points = {}
    for p in _strata_points(pair):
        val = f.on_point.get(p, 0) - z
        for c in pair.d_branches_at(p):
            val += curves[c]
        points[p] = val
    return LagrangianCycle(z, curves, points)


def euler_integral(pair: SurfacePair, f: ConstructibleFunction) -> Number:
    total = f.on_U * euler_open_complement(pair)
    for c in pair.d_curves:
        total += f.on_curve_stratum.get(c, f.on_U) * curve_stratum_euler(pair, c)
    for p in _strata_points(pair):
        total += f.on_point.get(p, 0)
    return total


def index_pairing(pair: SurfacePair, cycle: LagrangianCycle) -> Number:
    """Intersection with the zero section, as the Euler integral of Eu(cycle)."""
    return euler_integral(pair, euler_of_cycle(pair, cycle))


def lc_cycle(pair: SurfacePair, R: DivisorOnX) -> LagrangianCycle:
    if not R.supported_on_D(pair):
        off = sorted(c for c in R.support if not pair.in_D(c))
        raise SupportOffD(f"divisor has components off D: {off}")
    curves = {c: R[c] for c in pair.d_curves}
    points = {}
    for p in pair.d_double_points:
        a, b = pair.d_branches_at(p)
        points[p] = R[a] + R[b]
    return LagrangianCycle(0, curves, points)


def cc_structure_sheaf(pair: SurfacePair) -> LagrangianCycle:
    return LagrangianCycle(
        1, {c: 1 for c in pair.d_curves}, {p: 1 for p in pair.d_double_points}
    )


def delta_integrals(M: ExpConnection, max_blowups: int = 64) -> dict[str, Number]:
    """∫_P δIrr M for every marked point P of D (zeros kept)."""
    delta = delta_divisor(irr_data(M, max_blowups).irr)
    return {p: integral(delta, AtPoint(p)) for p in M.pair.d_points}


def cc_connection(M: ExpConnection, max_blowups: int = 64) -> LagrangianCycle:
    pair = M.pair
    R = irr_data(M, max_blowups).irr.on_x()
    points = LagrangianCycle(0, {}, delta_integrals(M, max_blowups))
    return cc_structure_sheaf(pair) * M.rank + lc_cycle(pair, R) + points


def local_solution_euler(M: ExpConnection, point_id: str, max_blowups: int = 64) -> Number:
    pair = M.pair
    if point_id not in pair.point:
        raise PointOffD(f"unknown point {point_id!r}")
    branches = pair.d_branches_at(point_id)
    if not branches:
        raise PointOffD(f"point {point_id!r} is not on D")
    d = delta_integrals(M, max_blowups)[point_id]
    if len(branches) >= 2:
        return d
    return -irr_along(M, DivValuation.prime(branches[0])) + d


def global_chi(M: ExpConnection, max_blowups: int = 64) -> Number:
    pair = M.pair
    data = irr_data(M, max_blowups)
    R = data.irr.on_x()
    return (
        M.rank * euler_open_complement(pair)
        + index_pairing(pair, lc_cycle(pair, R))
        + integral(delta_divisor(data.irr), All())
    )


def chi_routes(M: ExpConnection, max_blowups: int = 64) -> tuple[Number, Number]:
    """(global_chi, index pairing of the characteristic cycle)."""
    return global_chi(M, max_blowups), index_pairing(M.pair, cc_connection(M, max_blowups))


def curve_gos(genus: int, punctures: int, rank: int, irregularities) -> int:
    """Euler characteristic of a rank-``rank`` connection on a punctured curve."""
    irregularities = list(irregularities)
    if len(irregularities) != punctures:
        raise ValueError("one irregularity per puncture is required")
    return rank * (2 - 2 * genus - punctures) - sum(irregularities)


def fibration_chi(base_euler: int, fiber_chi: int) -> int:
    """χ of a locally trivial family: χ(base)·χ(fiber)."""
    return base_euler * fiber_chi


def cc_sol_restricted(M: ExpConnection, Z: DivisorOnX, max_blowups: int = 64) -> LagrangianCycle:
    """Characteristic cycle of the solutions of M restricted to the reduced
    divisor Z ⊆ D (extended by zero)."""
    pair = M.pair
    if not Z.supported_on_D(pair):
        raise SupportOffD(f"{Z} is not supported on D")
    if any(c != 1 for _, c in Z.items()):
        raise ValidationError(f"{Z} is not reduced", rule="NotReduced")
    comps = set(Z.support)
    R = irr_data(M, max_blowups).irr.on_x()
    deltas = delta_integrals(M, max_blowups)
    curves = {c: R[c] for c in sorted(comps)}
    points: dict[str, Number] = {}
    for p in pair.d_points:
        on_z = [c for c in pair.point[p].on if c in comps]
        if not on_z:
            continue
        val = deltas[p]
        if len(on_z) == 2:
            val += R[on_z[0]] + R[on_z[1]]
        elif len(pair.d_branches_at(p)) == 2:
            val += R[on_z[0]]
        points[p] = val
    return LagrangianCycle(0, curves, points)


__all__ = [
    "ConstructibleFunction",
    "LagrangianCycle",
    "cc_connection",
    "cc_sol_restricted",
    "cc_structure_sheaf",
    "chi_routes",
    "curve_gos",
    "curve_stratum_euler",
    "cycle_from_euler",
    "delta_integrals",
    "euler_integral",
    "euler_of_cycle",
    "fibration_chi",
    "global_chi",
    "index_pairing",
    "lc_cycle",
    "local_solution_euler",
]
