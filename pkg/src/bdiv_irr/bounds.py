"""Bound checks: slopes, Hom irregularity, turning points, recognition counts.

Every report carries the instantiated inequality; ``ok`` is False exactly
when the attained value exceeds the bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .bdivisor import AtPoint, SmoothLocusOfD, delta_divisor, integral
from .connection import (
    ExpConnection,
    direct_sum,
    hom_connection,
    irr_data,
    irr_on_x,
    slope_along,
    turning_points_on_x,
)
from .errors import PointNotSmoothOnD, SupportOffD, TurningOutsideZeroLocus
from .geometry import DivisorOnX, Number, SurfacePair, fdeg
from .valtree import evaluate, probe_valuations


@dataclass
class BoundReport:
    name: str
    bound_value: Number
    attained_value: Number
    certificate: dict[str, Any] = field(default_factory=dict)
    holds: bool | None = None

    @property
    def ok(self) -> bool:
        if self.holds is not None:
            return self.holds and self.attained_value <= self.bound_value
        return self.attained_value <= self.bound_value

    def line(self) -> str:
        mark = "ok" if self.ok else "VIOLATED"
        return f"{self.name}: attained {self.attained_value} <= bound {self.bound_value} [{mark}]"


def slope_bound_certificate(
    M: ExpConnection, f_divisor: DivisorOnX, probe_depth: int = 2, max_blowups: int = 64, d: int = 2
) -> BoundReport:
    """Check slope(v) ≤ d·fdeg(Irr(X,M))·f(v) on the resolution model and probes."""
    pair = M.pair
    if not f_divisor.is_effective():
        raise ValueError(f"{f_divisor} is not effective")
    if not f_divisor.supported_on_D(pair):
        raise SupportOffD(f"{f_divisor} is not supported on D")
    supp = set(f_divisor.support)
    for p in turning_points_on_x(M):
        if not supp.intersection(pair.point[p].on):
            raise TurningOutsideZeroLocus(f"turning point {p} is off the support of {f_divisor}")
    for s in M.summands:
        for key in s.value.constituents:
            for c, e in key:
                if e < 0 and c not in supp:
                    raise TurningOutsideZeroLocus(f"pole along {c} is off the support of {f_divisor}")
    data = irr_data(M, max_blowups)
    k = d * fdeg(pair, data.irr.on_x())
    best: Number = 0
    worst = None
    failures = []
    vals = probe_valuations(data.model, probe_depth, d_only=True)
    for v in vals:
        slope = slope_along(M, v)
        fv = evaluate(f_divisor, v)
        if slope > k * fv:
            failures.append((str(v), slope, fv))
        if fv > 0:
            ratio = Fraction(slope, 1) / fv
            if ratio > best:
                best, worst = ratio, str(v)
    best = best.numerator if isinstance(best, Fraction) and best.denominator == 1 else best
    cert = {"valuations_checked": len(vals), "argmax": worst, "failures": failures}
    return BoundReport("slope bound", k, best, cert, holds=not failures)


def hom_irr_bound_check(M1: ExpConnection, M2: ExpConnection) -> BoundReport:
    """Irr(X, Hom(M1,M2)) ≤ r2²·Irr(X,M1) + r1²·Irr(X,M2), rank r1·r2 ≤ r²."""
    pair = M1.pair
    r1, r2 = M1.rank, M2.rank
    H = hom_connection(M1, M2)
    lhs = irr_on_x(H)
    rhs = irr_on_x(M1) * (r2 * r2) + irr_on_x(M2) * (r1 * r1)
    r = max(r1, r2)
    holds = lhs.leq(rhs) and H.rank == r1 * r2 <= r * r
    cert = {"hom": str(lhs), "bound": str(rhs), "rank": H.rank, "rank_bound": r * r}
    return BoundReport("hom irregularity", fdeg(pair, rhs), fdeg(pair, lhs), cert, holds=holds)


def smooth_point_delta(M: ExpConnection, point_id: str, max_blowups: int = 64) -> Number:
    """∫_P (δIrr M + δIrr End M)."""
    data = irr_data(M, max_blowups)
    region = AtPoint(point_id)
    return integral(delta_divisor(data.irr), region) + integral(delta_divisor(data.irr_end), region)


def turning_criterion(M: ExpConnection, point_id: str, max_blowups: int = 64) -> bool:
    pair = M.pair
    if point_id not in pair.point or len(pair.d_branches_at(point_id)) != 1:
        raise PointNotSmoothOnD(f"{point_id!r} is not a smooth point of D")
    return smooth_point_delta(M, point_id, max_blowups) > 0


def turning_count_bound(M: ExpConnection, max_blowups: int = 64) -> BoundReport:
    pair = M.pair
    data = irr_data(M, max_blowups)
    smooth = SmoothLocusOfD()
    tl = turning_points_on_x(M)
    sing = len(pair.d_double_points)
    dint = integral(delta_divisor(data.irr), smooth) + integral(delta_divisor(data.irr_end), smooth)
    cert = {"turning_points": tl, "d_singular": sing, "smooth_delta": dint}
    return BoundReport("turning count", sing + dint, len(tl), cert)


# polynomials in (divisor, rank) -------------------------------------------


RANK = "#r"  # cannot clash with a curve id used as a variable


class Polynomial:
    """Polynomial with rational coefficients in one variable per curve and ``r``."""

    def __init__(self, terms: Mapping[tuple[tuple[str, int], ...], Number] | None = None):
        self.terms = {k: v for k, v in sorted((terms or {}).items()) if v}

    @classmethod
    def const(cls, c: Number) -> "Polynomial":
        return cls({(): c})

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): 1})

    @classmethod
    def rank(cls) -> "Polynomial":
        return cls.var(RANK)

    @classmethod
    def fdeg(cls, pair: SurfacePair) -> "Polynomial":
        return cls({((c, 1),): 1 for c in pair.d_curves})

    def __add__(self, other):
        other = _lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Polynomial(out)

    __radd__ = __add__

    def __mul__(self, other):
        other = _lift(other)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                powers = dict(k1)
                for x, e in k2:
                    powers[x] = powers.get(x, 0) + e
                key = tuple(sorted(powers.items()))
                out[key] = out.get(key, 0) + v1 * v2
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Polynomial.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, R: DivisorOnX, r: Number) -> Number:
        total: Number = 0
        for key, c in self.terms.items():
            term = c
            for x, e in key:
                term *= (r if x == RANK else R[x]) ** e
            total += term
        return total

    def degree(self) -> int:
        return max((sum(e for _, e in k) for k in self.terms), default=0)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.terms.items():
            names = [("r" if x == RANK else x) for x, _ in key]
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, (_, e) in zip(names, key))
            parts.append(f"{c}*{mono}" if mono and c != 1 else (mono or str(c)))
        return " + ".join(parts)


def _lift(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial.const(x)


def default_lefschetz_polynomial(pair: SurfacePair) -> Polynomial:
    """A fixture-calibrated heuristic, not a proven bound:
    L(R, r) = |D^sing| + 3·fdeg(R)·r²."""
    r = Polynomial.rank()
    return len(pair.d_double_points) + 3 * Polynomial.fdeg(pair) * r * r


def lefschetz_count(L, R: DivisorOnX, r: int) -> Number:
    """K(R, r) = L(2r²·R, 4r²) + 1."""
    return L(R * (2 * r * r), 4 * r * r) + 1


# recognition ---------------------------------------------------------------


def _hom_sum(M1: ExpConnection, M2: ExpConnection) -> ExpConnection:
    homs = [hom_connection(a, b) for a in (M1, M2) for b in (M1, M2)]
    return direct_sum(*homs, name=f"Hom({M1.name}+{M2.name})")


def recognition_obstruction(M1: ExpConnection, M2: ExpConnection) -> list[str]:
    """Points a recognising curve must avoid: D^sing and the turning points of
    the sum of the four Hom connections between M1 and M2."""
    pair = M1.pair
    pts = set(pair.d_double_points) | set(turning_points_on_x(_hom_sum(M1, M2)))
    return [p.id for p in pair.points if p.id in pts]


def recognition_bound(M1: ExpConnection, M2: ExpConnection, max_blowups: int = 64) -> BoundReport:
    N = _hom_sum(M1, M2)
    obstruction = recognition_obstruction(M1, M2)
    rep = turning_count_bound(N, max_blowups)
    return BoundReport(
        "recognition obstruction",
        rep.bound_value,
        len(obstruction),
        {"points": obstruction, **rep.certificate},
    )


__all__ = [
    "BoundReport",
    "Polynomial",
    "default_lefschetz_polynomial",
    "hom_irr_bound_check",
    "lefschetz_count",
    "recognition_bound",
    "recognition_obstruction",
    "slope_bound_certificate",
    "smooth_point_delta",
    "turning_count_bound",
    "turning_criterion",
]
