"""Cartier and finitely supported Weil b-divisors of a pair (X, D).

The central operator is the partial discrepancy: at a valuation whose last
centre is a smooth point of the pulled-back D, it measures how far the value
falls short of what the previous model predicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import ModelMismatch, NotAdmissible, NotXDBDivisor
from .geometry import DivisorOnX, Number, SurfacePair, fdeg
from .valtree import (
    Chain,
    DivValuation,
    Model,
    ModelDivisor,
    evaluate,
    incarnation,
    probe_valuations,
)


@dataclass(frozen=True)
class CartierBDivisor:
    """The b-divisor whose value at every valuation is read off by pulling
    ``divisor`` back from its determination model."""

    determination: Model
    divisor: ModelDivisor

    def __post_init__(self):
        if self.divisor.model != self.determination:
            raise ModelMismatch("divisor does not live on the determination model")

    @property
    def pair(self) -> SurfacePair:
        return self.determination.pair

    def __call__(self, v: DivValuation) -> Number:
        return evaluate(self.divisor, v)

    def on_x(self) -> DivisorOnX:
        """Incarnation on X (the pushforward of the divisor)."""
        return self.divisor.on_x()

    def incarnation(self, W: Model) -> ModelDivisor:
        return incarnation(self.divisor, W)

    def check_xd_support(self) -> None:
        m = self.determination
        off = [b for b, c in self.divisor.items() if c and not m.is_d_branch(b)]
        if off:
            raise NotXDBDivisor(f"nonzero coefficients off the transform of D: {off}")

    def __add__(self, other: "CartierBDivisor") -> "CartierBDivisor":
        return cartier_sum(self, other)


def pullback_system(pair: SurfacePair, div: DivisorOnX) -> CartierBDivisor:
    """The Cartier b-divisor determined on X by ``div``."""
    m = Model(pair)
    return CartierBDivisor(m, ModelDivisor(m, div.coeffs))


def cartier_on(model: Model, coeffs: Mapping[str, Number]) -> CartierBDivisor:
    return CartierBDivisor(model, ModelDivisor(model, coeffs))


def common_refinement(a: Model, b: Model) -> Model:
    """The smallest model containing both ``a`` and ``b``."""
    if a.pair != b.pair:
        raise ModelMismatch("models of different surfaces")
    out = a
    for nid in b.node_ids:
        chain = b.chain_of(nid)
        if out.node_for(chain) is None:
            out, _ = out.adjoin_chain(chain)
    return out


def cartier_sum(*zs: CartierBDivisor) -> CartierBDivisor:
    model = zs[0].determination
    for z in zs[1:]:
        model = common_refinement(model, z.determination)
    coeffs: dict[str, Number] = {}
    for b in model.branches():
        v = model.valuation(b)
        coeffs[b] = sum((z(v) for z in zs), 0)
    return cartier_on(model, coeffs)


@dataclass
class WeilBDivisor:
    """Finitely supported function on divisorial valuations."""

    pair: SurfacePair
    values: dict[DivValuation, Number] = field(default_factory=dict)

    def __post_init__(self):
        self.values = {
            v: c for v, c in sorted(self.values.items(), key=lambda kv: kv[0].sort_key()) if c
        }

    def __getitem__(self, v: DivValuation) -> Number:
        return self.values.get(v, 0)

    def items(self):
        return self.values.items()

    @property
    def support(self) -> list[DivValuation]:
        return list(self.values)

    def is_effective(self) -> bool:
        return all(c >= 0 for c in self.values.values())

    def __add__(self, other: "WeilBDivisor") -> "WeilBDivisor":
        out = dict(self.values)
        for v, c in other.items():
            out[v] = out.get(v, 0) + c
        return WeilBDivisor(self.pair, out)


# integration regions -----------------------------------------------------


@dataclass(frozen=True)
class All:
    def contains(self, pair: SurfacePair, v: DivValuation) -> bool:
        return True


@dataclass(frozen=True)
class AtPoint:
    id: str

    def contains(self, pair: SurfacePair, v: DivValuation) -> bool:
        return not v.is_prime and v.chain.root == "P:" + self.id


@dataclass(frozen=True)
class AlongCurve:
    id: str

    def contains(self, pair: SurfacePair, v: DivValuation) -> bool:
        if v.is_prime:
            return v.curve == self.id
        return self.id in v.chain.root_curves


@dataclass(frozen=True)
class SmoothLocusOfD:
    def contains(self, pair: SurfacePair, v: DivValuation) -> bool:
        if v.is_prime:
            return False
        return sum(1 for c in v.chain.root_curves if pair.in_D(c)) == 1


@dataclass(frozen=True)
class SingularLocusOfD:
    def contains(self, pair: SurfacePair, v: DivValuation) -> bool:
        if v.is_prime:
            return False
        return sum(1 for c in v.chain.root_curves if pair.in_D(c)) >= 2


def integral(W: WeilBDivisor, region=All()) -> Number:
    return sum((c for v, c in W.items() if region.contains(W.pair, v)), 0)


# partial discrepancy -----------------------------------------------------


def _ref_valuation(chain: Chain, ref: str) -> DivValuation:
    if ref.startswith("C:"):
        return DivValuation.prime(ref[2:])
    return DivValuation.exceptional(chain.prefix(int(ref[2:]) + 1))


def _d_refs(pair: SurfacePair, chain: Chain) -> list[str]:
    """References of the last centre that lie on the total transform of D."""
    out = []
    for r in chain.last_refs:
        if r.startswith("C:"):
            if pair.in_D(r[2:]):
                out.append(r)
        else:
            # every exceptional curve over a point of D lies over D
            out.append(r)
    return out


def partial_discrepancy_at(Z: CartierBDivisor, v: DivValuation, checked: bool = False) -> Number:
    if not checked:
        Z.check_xd_support()
    if v.is_prime:
        return 0
    pair = Z.pair
    chain = v.chain
    if not any(pair.in_D(c) for c in chain.root_curves):
        return 0
    refs = _d_refs(pair, chain)
    if len(refs) != 1:
        return 0
    return Z(_ref_valuation(chain, refs[0])) - Z(v)


def delta_divisor(Z: CartierBDivisor) -> WeilBDivisor:
    Z.check_xd_support()
    m = Z.determination
    vals = {}
    for nid in m.node_ids:
        v = m.valuation(nid)
        vals[v] = partial_discrepancy_at(Z, v, checked=True)
    return WeilBDivisor(Z.pair, vals)


def delta_by_node(Z: CartierBDivisor) -> dict[str, Number]:
    """δ indexed by node id of the determination model (zeros kept)."""
    Z.check_xd_support()
    m = Z.determination
    return {nid: partial_discrepancy_at(Z, m.valuation(nid), checked=True) for nid in m.node_ids}


# nef probing -------------------------------------------------------------


@dataclass
class NefResult:
    ok: bool
    witness: tuple[Model, DivValuation] | None = None
    submodels: int = 0
    valuations: int = 0

    def __bool__(self):
        return self.ok


def sub_models(model: Model, cap: int = 64) -> list[Model]:
    """Parent-closed sub-models of ``model``, X first.

    All of them when there are at most ``cap``; otherwise the creation-order
    prefixes together with the ancestor closure of each node, which is enough
    to see every single-node defect.
    """
    ids = list(model.node_ids)
    out: list[frozenset[str]] = []
    seen: set[frozenset[str]] = set()

    def add(s: frozenset[str]) -> None:
        if s not in seen:
            seen.add(s)
            out.append(s)

    # enumerate down-closed sets by extending with nodes whose parent is in
    frontier = [frozenset()]
    add(frozenset())
    exhausted = True
    while frontier:
        nxt = []
        for s in frontier:
            for n in ids:
                if n in s:
                    continue
                p = model.parent(n)
                if p is not None and p not in s:
                    continue
                t = s | {n}
                if t in seen:
                    continue
                if len(seen) >= cap:
                    exhausted = False
                    break
                add(t)
                nxt.append(t)
        frontier = nxt
        if not exhausted:
            break
    if not exhausted:
        for k in range(len(ids) + 1):
            add(frozenset(ids[:k]))
        for n in ids:
            add(frozenset(model.ancestors(n) + [n]))
    return [model.restricted_to(s) for s in out]


def is_nef_probe(Z: CartierBDivisor, depth: int = 3, max_submodels: int = 64) -> NefResult:
    """Check Z(v) ≤ Z(W)(v) over sub-models W of the determination model and
    probe valuations v up to ``depth`` blow-ups beyond it."""
    Y = Z.determination
    probes = probe_valuations(Y, depth, d_only=False)
    values = [(v, Z(v)) for v in probes]
    subs = sub_models(Y, max_submodels)
    for W in subs:
        inc = Z.incarnation(W)
        for v, zv in values:
            if zv > evaluate(inc, v):
                return NefResult(False, (W, v), len(subs), len(values))
    return NefResult(True, None, len(subs), len(values))


# multiplicity estimate ---------------------------------------------------


@dataclass
class EstimateResult:
    ok: bool
    violation: tuple[DivValuation, Number, Number] | None = None
    checked: int = 0

    def __bool__(self):
        return self.ok


def check_multiplicity_estimate(
    pair: SurfacePair, R: DivisorOnX, Zdiv: DivisorOnX, chain: Chain, d: int = 2
) -> EstimateResult:
    """Verify R(v) ≤ d·fdeg(R)·Zdiv(v) along an admissible chain.

    A chain is admissible when every centre lies on the strict transform of
    a component of ``Zdiv`` (so the chain follows one such component).
    """
    support = set(Zdiv.support)
    for i, (refs, _) in enumerate(chain.steps):
        if not any(r.startswith("C:") and r[2:] in support for r in refs):
            where = "root" if i == 0 else f"step {i}"
            raise NotAdmissible(f"{where} of {chain} is off the strict transform of {Zdiv}")
    k = d * fdeg(pair, R)
    checked = 0
    for n in range(1, chain.depth + 1):
        v = DivValuation.exceptional(chain.prefix(n))
        lhs = evaluate(R, v)
        rhs = k * evaluate(Zdiv, v)
        checked += 1
        if lhs > rhs:
            return EstimateResult(False, (v, lhs, rhs), checked)
    return EstimateResult(True, None, checked)


__all__ = [
    "All",
    "CartierBDivisor",
    "AlongCurve",
    "AtPoint",
    "EstimateResult",
    "NefResult",
    "SingularLocusOfD",
    "SmoothLocusOfD",
    "WeilBDivisor",
    "cartier_on",
    "cartier_sum",
    "check_multiplicity_estimate",
    "common_refinement",
    "delta_by_node",
    "delta_divisor",
    "fdeg",
    "integral",
    "is_nef_probe",
    "partial_discrepancy_at",
    "pullback_system",
    "sub_models",
]
