"""Abstract surface pairs (X, D) given by a transverse curve configuration.

The surface is never realized by equations: the listed marked points define
the incidence structure, and every downstream formula only reads genera,
incidences and the topological Euler characteristic of X.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Union

from .errors import DuplicateId, SupportOffD, TripleIncidence, UnknownCurveRef, ValidationError

Number = Union[int, Fraction]


@dataclass(frozen=True)
class Curve:
    id: str
    genus: int = 0
    in_D: bool = True


@dataclass(frozen=True)
class MarkedPoint:
    id: str
    on: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "on", tuple(self.on))


@dataclass(frozen=True)
class SurfacePair:
    chi_top: int
    curves: tuple[Curve, ...]
    points: tuple[MarkedPoint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "points", tuple(self.points))

    @cached_property
    def curve(self) -> dict[str, Curve]:
        return {c.id: c for c in self.curves}

    @cached_property
    def point(self) -> dict[str, MarkedPoint]:
        return {p.id: p for p in self.points}

    @cached_property
    def d_curves(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.curves if c.in_D)

    def in_D(self, curve_id: str) -> bool:
        return self.curve[curve_id].in_D

    def d_branches_at(self, point_id: str) -> tuple[str, ...]:
        return tuple(c for c in self.point[point_id].on if self.in_D(c))

    def on_D(self, point_id: str) -> bool:
        return bool(self.d_branches_at(point_id))

    @cached_property
    def d_points(self) -> tuple[str, ...]:
        """Marked points lying on D, in declaration order."""
        return tuple(p.id for p in self.points if self.on_D(p.id))

    @cached_property
    def d_double_points(self) -> tuple[str, ...]:
        return tuple(p for p in self.d_points if len(self.d_branches_at(p)) == 2)

    @cached_property
    def d_smooth_points(self) -> tuple[str, ...]:
        return tuple(p for p in self.d_points if len(self.d_branches_at(p)) == 1)

    def points_on(self, curve_id: str) -> tuple[str, ...]:
        return tuple(p.id for p in self.points if curve_id in p.on)

    def intersection_number(self, a: str, b: str) -> int:
        """C_a . C_b for distinct curves, read off the listed points."""
        if a == b:
            raise ValueError("self-intersections are not modelled")
        return sum(1 for p in self.points if a in p.on and b in p.on)


def validate_pair(pair: SurfacePair) -> None:
    """Raise on the first violated invariant; return None when the pair is valid."""
    seen: set[str] = set()
    for c in pair.curves:
        if c.id in seen:
            raise DuplicateId(f"curve id {c.id!r} declared twice")
        seen.add(c.id)
        if c.genus < 0:
            raise ValidationError(f"curve {c.id!r} has negative genus", rule="NegativeGenus")
    for p in pair.points:
        if p.id in seen:
            raise DuplicateId(f"point id {p.id!r} clashes with an existing id")
        seen.add(p.id)
        if len(p.on) >= 3:
            raise TripleIncidence(f"point {p.id!r} lies on {len(p.on)} curves")
        if len(set(p.on)) != len(p.on):
            raise ValidationError(f"point {p.id!r} lists a curve twice", rule="RepeatedIncidence")
        for c in p.on:
            if c not in pair.curve:
                raise UnknownCurveRef(f"point {p.id!r} references unknown curve {c!r}")


def euler_open_complement(pair: SurfacePair) -> int:
    """chi(X minus D) by inclusion-exclusion over the components of D."""
    chi = pair.chi_top
    for cid in pair.d_curves:
        chi -= 2 - 2 * pair.curve[cid].genus
    return chi + len(pair.d_double_points)


def stratum_euler(pair: SurfacePair, ids: Iterable[str]) -> int:
    """chi of the open stratum D_I minus the other components of D."""
    ids = frozenset(ids)
    if not ids:
        raise ValueError("stratum index set must be nonempty")
    for cid in ids:
        if cid not in pair.curve:
            raise UnknownCurveRef(f"unknown curve {cid!r}")
        if not pair.in_D(cid):
            raise SupportOffD(f"curve {cid!r} is not a component of D")
    if len(ids) == 1:
        (cid,) = ids
        cut = sum(1 for p in pair.d_double_points if cid in pair.point[p].on)
        return 2 - 2 * pair.curve[cid].genus - cut
    if len(ids) == 2:
        a, b = sorted(ids)
        return pair.intersection_number(a, b)
    return 0


class DivisorOnX:
    """Finitely supported integer (or rational) combination of curves of X."""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Mapping[str, Number] | None = None):
        items = {}
        for k, v in (coeffs or {}).items():
            if v:
                items[k] = _normalize(v)
        self._coeffs = dict(sorted(items.items()))
        self._hash = None

    @property
    def coeffs(self) -> dict[str, Number]:
        return dict(self._coeffs)

    def __getitem__(self, curve_id: str) -> Number:
        return self._coeffs.get(curve_id, 0)

    def items(self):
        return self._coeffs.items()

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self._coeffs)

    def is_effective(self) -> bool:
        return all(v >= 0 for v in self._coeffs.values())

    def supported_on_D(self, pair: SurfacePair) -> bool:
        return all(pair.in_D(c) for c in self._coeffs)

    def restrict(self, curve_ids: Iterable[str]) -> "DivisorOnX":
        keep = set(curve_ids)
        return DivisorOnX({k: v for k, v in self._coeffs.items() if k in keep})

    def leq(self, other: "DivisorOnX") -> bool:
        keys = set(self._coeffs) | set(other._coeffs)
        return all(self[k] <= other[k] for k in keys)

    def __add__(self, other: "DivisorOnX") -> "DivisorOnX":
        out = dict(self._coeffs)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return DivisorOnX(out)

    def __neg__(self) -> "DivisorOnX":
        return DivisorOnX({k: -v for k, v in self._coeffs.items()})

    def __sub__(self, other: "DivisorOnX") -> "DivisorOnX":
        return self + (-other)

    def __mul__(self, scalar: Number) -> "DivisorOnX":
        return DivisorOnX({k: scalar * v for k, v in self._coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, DivisorOnX):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._coeffs.items()))
        return self._hash

    def __bool__(self):
        return bool(self._coeffs)

    def __repr__(self):
        return f"DivisorOnX({self._coeffs!r})"

    def __str__(self):
        return format_divisor(self._coeffs)


def _normalize(v: Number) -> Number:
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def format_divisor(coeffs: Mapping[str, Number]) -> str:
    terms = []
    for k, v in coeffs.items():
        if not v:
            continue
        terms.append(k if v == 1 else f"{v}*{k}")
    return " + ".join(terms) if terms else "0"


def fdeg(pair: SurfacePair, div: DivisorOnX) -> Number:
    """Formal degree: every component of D counts once."""
    if not div.supported_on_D(pair):
        off = sorted(c for c in div.support if not pair.in_D(c))
        raise SupportOffD(f"divisor has components off D: {off}")
    return sum(div.coeffs.values())


def pairwise_intersections(pair: SurfacePair) -> dict[tuple[str, str], int]:
    """Intersection numbers for every unordered pair of distinct curves."""
    ids = [c.id for c in pair.curves]
    return {(a, b): pair.intersection_number(a, b) for a, b in combinations(sorted(ids), 2)}


__all__ = [
    "Curve",
    "MarkedPoint",
    "SurfacePair",
    "DivisorOnX",
    "validate_pair",
    "euler_open_complement",
    "stratum_euler",
    "fdeg",
    "format_divisor",
    "pairwise_intersections",
]
