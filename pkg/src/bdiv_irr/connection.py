"""Connections of exponential type E^φ ⊗ R with monomial irregular values.

Each irregular value is a formal combination of monomials x^e with generic
nonzero coefficients.  Coefficients are symbols ("tags"), so two monomials
only cancel when they are formally identical; no accidental cancellation of
leading terms is ever assumed.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .bdivisor import CartierBDivisor, cartier_on
from .errors import PoleOffD, ResolutionBudgetExceeded, UnknownCurveRef, ValidationError
from .geometry import DivisorOnX, Number, SurfacePair
from .valtree import DivValuation, Model, ModelDivisor, ModelPoint, evaluate, total_transform

ExpKey = tuple[tuple[str, int], ...]
TagKey = tuple[tuple[str, int], ...]


def exp_key(exponents: Mapping[str, int]) -> ExpKey:
    return tuple(sorted((c, int(e)) for c, e in exponents.items() if e))


@dataclass(frozen=True)
class Monomial:
    exponents: ExpKey
    coeff_tag: str = "c"

    @classmethod
    def of(cls, exponents: Mapping[str, int], coeff_tag: str = "c") -> "Monomial":
        return cls(exp_key(exponents), coeff_tag)

    @property
    def divisor(self) -> DivisorOnX:
        return DivisorOnX(dict(self.exponents))


@dataclass(frozen=True)
class Combination:
    """Sum over exponent vectors of (integer combination of tags)·x^e."""

    terms: tuple[tuple[ExpKey, TagKey], ...] = ()

    @classmethod
    def build(cls, terms: Mapping[ExpKey, Mapping[str, int]]) -> "Combination":
        out = []
        for key, tags in terms.items():
            tk = tuple(sorted((t, n) for t, n in tags.items() if n))
            if tk:
                out.append((key, tk))
        return cls(tuple(sorted(out)))

    @classmethod
    def monomial(cls, exponents: Mapping[str, int], coeff_tag: str = "c") -> "Combination":
        return cls.build({exp_key(exponents): {coeff_tag: 1}})

    @classmethod
    def zero(cls) -> "Combination":
        return cls(())

    def as_dict(self) -> dict[ExpKey, Counter]:
        return {k: Counter(dict(t)) for k, t in self.terms}

    def __add__(self, other: "Combination") -> "Combination":
        acc = self.as_dict()
        for k, t in other.terms:
            acc.setdefault(k, Counter()).update(dict(t))
        return Combination.build(acc)

    def __neg__(self) -> "Combination":
        return Combination(tuple((k, tuple((t, -n) for t, n in tk)) for k, tk in self.terms))

    def __sub__(self, other: "Combination") -> "Combination":
        return self + (-other)

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def constituents(self) -> tuple[ExpKey, ...]:
        return tuple(k for k, _ in self.terms)

    def curves(self) -> set[str]:
        return {c for k in self.constituents for c, _ in k}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, tags in self.terms:
            coeff = _format_tags(tags)
            mono = "*".join(c if e == 1 else f"{c}^{e}" for c, e in key)
            parts.append(f"{coeff}*{mono}" if mono else coeff)
        return " + ".join(parts)


def _format_tags(tags: TagKey) -> str:
    if len(tags) == 1 and tags[0][1] == 1:
        return tags[0][0]
    out = ""
    for t, n in tags:
        sign = "-" if n < 0 else "+"
        mag = "" if abs(n) == 1 else f"{abs(n)}"
        out += f"{sign}{mag}{t}"
    return "(" + out.lstrip("+") + ")"


@dataclass(frozen=True)
class ExpSummand:
    value: Combination
    rank: int = 1


@dataclass(frozen=True)
class ExpConnection:
    pair: SurfacePair
    summands: tuple[ExpSummand, ...]
    name: str = "M"

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(self.summands))

    @property
    def rank(self) -> int:
        return sum(s.rank for s in self.summands)

    @property
    def values(self) -> tuple[Combination, ...]:
        """Distinct irregular values, in first-appearance order."""
        seen: dict[Combination, None] = {}
        for s in self.summands:
            seen.setdefault(s.value, None)
        return tuple(seen)

    def is_regular(self) -> bool:
        return all(not s.value for s in self.summands)


def exp_connection(pair: SurfacePair, summands: Iterable[tuple[Mapping[str, int], int, str]], name="M"):
    """Convenience constructor from (exponents, rank, tag) triples."""
    return ExpConnection(
        pair, tuple(ExpSummand(Combination.monomial(e, t), r) for e, r, t in summands), name
    )


def direct_sum(*ms: ExpConnection, name: str = "M") -> ExpConnection:
    return ExpConnection(ms[0].pair, tuple(s for m in ms for s in m.summands), name)


def validate_connection(M: ExpConnection, pair: SurfacePair | None = None) -> None:
    pair = pair or M.pair
    if not M.summands:
        raise ValidationError(f"connection {M.name!r} has no summands", rule="EmptyConnection")
    for s in M.summands:
        if s.rank < 1:
            raise ValidationError(f"connection {M.name!r}: summand rank {s.rank} < 1", rule="NonPositiveRank")
        for key in s.value.constituents:
            for c, e in key:
                if c not in pair.curve:
                    raise UnknownCurveRef(f"connection {M.name!r}: unknown curve {c!r}")
                if e < 0 and not pair.in_D(c):
                    raise PoleOffD(f"connection {M.name!r}: pole along {c!r}, which is not in D")


# valuations ----------------------------------------------------------------


def val_along(value: Combination, v: DivValuation) -> Number | None:
    """Order of ``value`` along v; None for the zero combination."""
    if not value:
        return None
    return min(evaluate(DivisorOnX(dict(k)), v) for k in value.constituents)


def irr_along(M: ExpConnection, v: DivValuation) -> int:
    total = 0
    for s in M.summands:
        val = val_along(s.value, v)
        if val is not None and val < 0:
            total += s.rank * -val
    return total


def slope_along(M: ExpConnection, v: DivValuation) -> Number:
    best = 0
    for s in M.summands:
        val = val_along(s.value, v)
        if val is not None and -val > best:
            best = -val
    return best


def _exponent_tables(values: Iterable[Combination], model: Model) -> dict[ExpKey, ModelDivisor]:
    out = {}
    for value in values:
        for key in value.constituents:
            if key not in out:
                out[key] = total_transform(DivisorOnX(dict(key)), model)
    return out


def generic_irr_divisor(M: ExpConnection, W: Model) -> ModelDivisor:
    tables = _exponent_tables(M.values, W)
    coeffs = {}
    for b in W.branches():
        total = 0
        for s in M.summands:
            if not s.value:
                continue
            val = min(tables[k][b] for k in s.value.constituents)
            if val < 0:
                total += s.rank * -val
        coeffs[b] = total
    return ModelDivisor(W, coeffs)


# goodness ------------------------------------------------------------------


def _difference_passes(diff: Combination, vecs: Mapping[ExpKey, tuple[int, ...]]) -> bool:
    if not diff:
        return True
    poles = [vecs[k] for k in diff.constituents]
    if all(x <= 0 for p in poles for x in p):
        return True
    top = tuple(max(col) for col in zip(*poles))
    return top in poles and all(x >= 0 for x in top)


def _pole_vectors(values: Iterable[Combination], model: Model, branches: Sequence[str], tables=None):
    vecs = {}
    for value in values:
        for key in value.constituents:
            if key in vecs:
                continue
            if tables is not None and key in tables:
                md = tables[key]
                vecs[key] = tuple(-md[b] for b in branches)
            else:
                div = DivisorOnX(dict(key))
                vecs[key] = tuple(-evaluate(div, model.valuation(b)) for b in branches)
    return vecs


def _all_differences(values: Sequence[Combination]) -> list[Combination]:
    vals = list(values)
    if Combination.zero() not in vals:
        vals.append(Combination.zero())
    return [vals[i] - vals[j] for i in range(len(vals)) for j in range(i + 1, len(vals))]


def is_good_at(M: ExpConnection, point, model: Model | None = None) -> bool:
    """Goodness at a marked point of X (by id) or at a ``ModelPoint``."""
    model = model or Model(M.pair)
    if isinstance(point, ModelPoint):
        branches = sorted(point.branches)
    else:
        branches = sorted(M.pair.point[point].on)
    if len(branches) < 2:
        return True
    values = M.values
    diffs = _all_differences(values)
    vecs = _pole_vectors(diffs, model, branches)
    return all(_difference_passes(d, vecs) for d in diffs)


def _candidate_points(model: Model) -> list[ModelPoint]:
    return [p for p in model.points() if any(model.is_d_branch(b) for b in p.branches)]


def turning_locus(M: ExpConnection, W: Model | None = None) -> list[ModelPoint]:
    W = W or Model(M.pair)
    return [p for p in _candidate_points(W) if not is_good_at(M, p, W)]


def turning_points_on_x(M: ExpConnection) -> list[str]:
    return [p.base for p in turning_locus(M, Model(M.pair))]


# resolution ----------------------------------------------------------------


def _good_for_all(ms: Sequence[ExpConnection], point: ModelPoint, model: Model) -> bool:
    return all(is_good_at(m, point, model) for m in ms)


def resolve_turning_points(
    M: ExpConnection | Sequence[ExpConnection], max_blowups: int = 64
) -> Model:
    """Blow up turning points until every given connection is good.

    Roots are handled in order of point id and each tree depth-first, taking
    satellite points in order of branch id; new nodes are named E1, E2, ...
    in creation order.
    """
    ms = [M] if isinstance(M, ExpConnection) else list(M)
    pair = ms[0].pair
    model = Model(pair)
    roots = sorted(_candidate_points(model), key=lambda p: p.label)
    for root in roots:
        if _good_for_all(ms, root, model):
            continue
        used = 0
        stack = [root]
        while stack:
            pt = stack.pop()
            if _good_for_all(ms, pt, model):
                continue
            if used >= max_blowups:
                raise ResolutionBudgetExceeded(
                    f"more than {max_blowups} blow-ups over {root.label}", partial_model=model
                )
            model, nid = model.adjoin_chain(pt.chain)
            used += 1
            sats = [p for p in model.points() if p.base == nid]
            sats.sort(key=lambda p: sorted(p.branches - {nid}))
            stack.extend(reversed(sats))
    return model


# Hom / End -----------------------------------------------------------------


def hom_connection(M1: ExpConnection, M2: ExpConnection, name: str | None = None) -> ExpConnection:
    summands = []
    for a in M1.summands:
        for b in M2.summands:
            summands.append(ExpSummand(b.value - a.value, a.rank * b.rank))
    return ExpConnection(M1.pair, tuple(summands), name or f"Hom({M1.name},{M2.name})")


def end_connection(M: ExpConnection) -> ExpConnection:
    return hom_connection(M, M, f"End({M.name})")


# the irregularity b-divisor ------------------------------------------------


@dataclass(frozen=True)
class IrrData:
    """Irr M and Irr End M, both determined on the joint resolution."""

    connection: ExpConnection
    model: Model
    irr: CartierBDivisor
    irr_end: CartierBDivisor


@lru_cache(maxsize=256)
def irr_data(M: ExpConnection, max_blowups: int = 64) -> IrrData:
    E = end_connection(M)
    model = resolve_turning_points([M, E], max_blowups)
    irr = cartier_on(model, generic_irr_divisor(M, model).coeffs)
    irr_end = cartier_on(model, generic_irr_divisor(E, model).coeffs)
    return IrrData(M, model, irr, irr_end)


def irr_bdivisor(M: ExpConnection, max_blowups: int = 64) -> CartierBDivisor:
    return irr_data(M, max_blowups).irr


def irr_on_x(M: ExpConnection) -> DivisorOnX:
    return generic_irr_divisor(M, Model(M.pair)).on_x()


__all__ = [
    "Combination",
    "ExpConnection",
    "ExpSummand",
    "IrrData",
    "Monomial",
    "direct_sum",
    "end_connection",
    "exp_connection",
    "exp_key",
    "generic_irr_divisor",
    "hom_connection",
    "irr_along",
    "irr_bdivisor",
    "irr_data",
    "irr_on_x",
    "is_good_at",
    "resolve_turning_points",
    "slope_along",
    "turning_locus",
    "turning_points_on_x",
    "val_along",
    "validate_connection",
]
