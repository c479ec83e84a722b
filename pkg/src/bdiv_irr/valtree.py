"""Infinitely-near-point forests and divisorial valuations.

A divisorial valuation of a surface is the exceptional divisor of a unique
chain of point blow-ups, each centre lying on the previous exceptional curve.
Here such a chain is stored canonically as a ``Chain``: a root point of X
followed by steps, each step listing the branches through the blown-up point.
Branch references inside a chain are ``"C:<curve>"`` for strict transforms of
curves of X and ``"E:<i>"`` for the exceptional curve of step ``i`` of the same
chain.  Two models that contain the same chain contain the same valuation, no
matter how their nodes are named.

A ``Model`` is a parent-closed forest of named nodes (a composite of point
blow-ups of X).  Models are immutable: ``blow_up`` returns a new one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Union

from .errors import IllegalIncidence, ModelMismatch, UnknownBranch
from .geometry import DivisorOnX, Number, SurfacePair, _normalize, format_divisor

Step = tuple[tuple[str, ...], str]


@dataclass(frozen=True)
class FreePoint:
    """A general point of a curve of X that is not one of the marked points."""

    curve: str
    tag: str = "generic"

    @property
    def code(self) -> str:
        return f"F:{self.curve}@{self.tag}"


@dataclass(frozen=True, order=True)
class Chain:
    root: str
    steps: tuple[Step, ...]

    @property
    def depth(self) -> int:
        return len(self.steps)

    def prefix(self, n: int) -> "Chain":
        return Chain(self.root, self.steps[:n])

    @property
    def last_refs(self) -> tuple[str, ...]:
        return self.steps[-1][0]

    def extend(self, refs: Iterable[str], tag: str = "") -> "Chain":
        return Chain(self.root, self.steps + ((tuple(sorted(refs)), tag),))

    def children(self, tag: str = "probe") -> list["Chain"]:
        """The chains one blow-up deeper: satellite points and one free point."""
        me = f"E:{self.depth - 1}"
        out = [self.extend((me, r)) for r in self.last_refs]
        out.append(self.extend((me,), tag))
        return out

    @property
    def root_point(self) -> str | None:
        return self.root[2:] if self.root.startswith("P:") else None

    @property
    def root_curves(self) -> tuple[str, ...]:
        return tuple(r[2:] for r in self.steps[0][0])

    def __str__(self) -> str:
        parts = [self.root[2:]]
        for i, (refs, tag) in enumerate(self.steps[1:], start=1):
            others = [r for r in refs if r != f"E:{i - 1}"]
            if others:
                parts.append("^" + ",".join(r[2:] if r.startswith("C:") else "e" + r[2:] for r in others))
            else:
                parts.append("@" + (tag or "free"))
        return ">".join(parts)


def root_chain(pair: SurfacePair, base: Union[str, FreePoint]) -> Chain:
    if isinstance(base, FreePoint):
        if base.curve not in pair.curve:
            raise UnknownBranch(f"unknown curve {base.curve!r}")
        return Chain(base.code, ((("C:" + base.curve,), ""),))
    pt = pair.point[base]
    return Chain("P:" + base, ((tuple(sorted("C:" + c for c in pt.on)), ""),))


@dataclass(frozen=True, order=True)
class DivValuation:
    """``PrimeOnX(curve)`` or ``Exceptional(chain)``."""

    curve: str | None = None
    chain: Chain | None = None

    @classmethod
    def prime(cls, curve: str) -> "DivValuation":
        return cls(curve=curve)

    @classmethod
    def exceptional(cls, chain: Chain) -> "DivValuation":
        return cls(chain=chain)

    @property
    def is_prime(self) -> bool:
        return self.curve is not None

    def sort_key(self):
        if self.curve is not None:
            return (0, self.curve, ())
        return (1, self.chain.root, self.chain.steps)

    def __str__(self) -> str:
        return self.curve if self.curve is not None else str(self.chain)


@dataclass(frozen=True)
class InfNearNode:
    id: str
    base: Union[str, FreePoint]
    incident: frozenset[str]
    position_tag: str = ""

    def __post_init__(self):
        object.__setattr__(self, "incident", frozenset(self.incident))


@dataclass(frozen=True)
class ModelPoint:
    """A closed point of a model, described by the branches through it."""

    base: str
    branches: frozenset[str]
    chain: Chain
    label: str


class Model:
    """Parent-closed forest of blow-ups of X; the empty model is X itself."""

    def __init__(self, pair: SurfacePair, nodes: Iterable[InfNearNode] = ()):
        self.pair = pair
        self._nodes: dict[str, InfNearNode] = {}
        self._chain: dict[str, Chain] = {}
        self._by_chain: dict[Chain, str] = {}
        self._parent: dict[str, str | None] = {}
        for node in nodes:
            self._adjoin(node)

    # construction -------------------------------------------------------
    def _adjoin(self, node: InfNearNode) -> None:
        pair = self.pair
        if node.id in self._nodes or node.id in pair.curve or node.id in pair.point:
            raise IllegalIncidence(f"node id {node.id!r} already in use")
        if len(node.incident) > 2:
            raise IllegalIncidence(f"node {node.id!r}: at most two branches may pass through a centre")
        base = node.base
        if isinstance(base, str) and base in self._nodes:
            parent = base
            for b in node.incident:
                if b not in pair.curve and b not in self._nodes:
                    raise UnknownBranch(f"node {node.id!r}: unknown branch {b!r}")
            if parent not in node.incident:
                raise IllegalIncidence(
                    f"node {node.id!r}: a point infinitely near {parent!r} lies on its exceptional curve"
                )
            others = node.incident - {parent}
            allowed = self._nodes[parent].incident
            for b in others:
                if b not in allowed:
                    raise IllegalIncidence(
                        f"node {node.id!r}: branch {b!r} does not meet the exceptional curve of {parent!r}"
                    )
            pchain = self._chain[parent]
            refs = [self._ref(b) for b in node.incident]
            chain = pchain.extend(refs, node.position_tag if not others else "")
        else:
            parent = None
            if isinstance(base, FreePoint):
                through = {base.curve}
                if base.curve not in pair.curve:
                    raise UnknownBranch(f"node {node.id!r}: unknown curve {base.curve!r}")
            elif isinstance(base, str) and base in pair.point:
                through = set(pair.point[base].on)
            else:
                raise UnknownBranch(f"node {node.id!r}: unknown base {base!r}")
            for b in node.incident:
                if b not in pair.curve and b not in self._nodes:
                    raise UnknownBranch(f"node {node.id!r}: unknown branch {b!r}")
            if set(node.incident) != through:
                raise IllegalIncidence(
                    f"node {node.id!r}: branches through {base!s} are {sorted(through)}, got {sorted(node.incident)}"
                )
            chain = root_chain(pair, base)
        if chain in self._by_chain:
            raise IllegalIncidence(
                f"node {node.id!r}: that point was already blown up as {self._by_chain[chain]!r}"
            )
        self._nodes[node.id] = node
        self._chain[node.id] = chain
        self._by_chain[chain] = node.id
        self._parent[node.id] = parent

    def _ref(self, branch: str) -> str:
        if branch in self.pair.curve:
            return "C:" + branch
        return f"E:{self._chain[branch].depth - 1}"

    def blow_up(
        self,
        base: Union[str, FreePoint],
        incident: Iterable[str],
        position_tag: str = "",
        node_id: str | None = None,
    ) -> "Model":
        node = InfNearNode(node_id or self.fresh_id(), base, frozenset(incident), position_tag)
        return Model(self.pair, list(self._nodes.values()) + [node])

    def fresh_id(self, prefix: str = "E") -> str:
        taken = set(self._nodes) | set(self.pair.curve) | set(self.pair.point)
        k = len(self._nodes) + 1
        while f"{prefix}{k}" in taken:
            k += 1
        return f"{prefix}{k}"

    def adjoin_chain(self, chain: Chain, prefix: str = "E") -> tuple["Model", str]:
        """Return a copy of this model containing every node of ``chain``."""
        model = self
        for n in range(1, chain.depth + 1):
            sub = chain.prefix(n)
            if sub in model._by_chain:
                continue
            model = model.blow_up_chain_step(sub, prefix)
        return model, model._by_chain[chain]

    def blow_up_chain_step(self, chain: Chain, prefix: str = "E") -> "Model":
        """Blow up the centre of the last step of ``chain`` (its prefix must exist)."""
        refs, tag = chain.steps[-1]
        nid = self.fresh_id(prefix)
        if chain.depth == 1:
            if chain.root.startswith("P:"):
                base: Union[str, FreePoint] = chain.root[2:]
            else:
                curve, t = chain.root[2:].split("@", 1)
                base = FreePoint(curve, t)
            incident = [r[2:] for r in refs]
            return self.blow_up(base, incident, "", nid)
        parent = self._by_chain[chain.prefix(chain.depth - 1)]
        incident = [self._branch_of(chain, r) for r in refs]
        return self.blow_up(parent, incident, tag, nid)

    def _branch_of(self, chain: Chain, ref: str) -> str:
        if ref.startswith("C:"):
            return ref[2:]
        return self._by_chain[chain.prefix(int(ref[2:]) + 1)]

    # queries ------------------------------------------------------------
    @property
    def nodes(self) -> tuple[InfNearNode, ...]:
        return tuple(self._nodes.values())

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(self._nodes)

    def node(self, node_id: str) -> InfNearNode:
        return self._nodes[node_id]

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def chain_of(self, node_id: str) -> Chain:
        return self._chain[node_id]

    def node_for(self, chain: Chain) -> str | None:
        return self._by_chain.get(chain)

    def parent(self, node_id: str) -> str | None:
        return self._parent[node_id]

    def children(self, node_id: str) -> list[str]:
        return [n for n, p in self._parent.items() if p == node_id]

    def roots(self) -> list[str]:
        return [n for n, p in self._parent.items() if p is None]

    def ancestors(self, node_id: str) -> list[str]:
        out = []
        cur = self._parent[node_id]
        while cur is not None:
            out.append(cur)
            cur = self._parent[cur]
        return out[::-1]

    @property
    def chains(self) -> frozenset[Chain]:
        return frozenset(self._by_chain)

    def branches(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.pair.curves) + self.node_ids

    def root_of(self, node_id: str) -> str:
        return self._chain[node_id].root

    def root_point_of(self, node_id: str) -> str | None:
        return self._chain[node_id].root_point

    def depth_of(self, node_id: str) -> int:
        return self._chain[node_id].depth

    def over_D(self, chain: Chain) -> bool:
        return any(self.pair.in_D(c) for c in chain.root_curves)

    def is_d_branch(self, branch: str) -> bool:
        if branch in self.pair.curve:
            return self.pair.in_D(branch)
        return self.over_D(self._chain[branch])

    def valuation(self, branch: str) -> DivValuation:
        if branch in self.pair.curve:
            return DivValuation.prime(branch)
        if branch not in self._nodes:
            raise UnknownBranch(f"unknown branch {branch!r}")
        return DivValuation.exceptional(self._chain[branch])

    def extends(self, other: "Model") -> bool:
        return other.pair == self.pair and other.chains <= self.chains

    def restricted_to(self, node_ids: Iterable[str]) -> "Model":
        keep = set(node_ids)
        for n in keep:
            if self._parent[n] is not None and self._parent[n] not in keep:
                raise ModelMismatch(f"sub-model is not parent-closed at {n!r}")
        return Model(self.pair, [nd for nd in self._nodes.values() if nd.id in keep])

    def points(self, include_smooth_marked: bool = False) -> list[ModelPoint]:
        """Closed points of the model lying on two branches (and, optionally,
        marked points of X on a single curve), excluding blown-up centres."""
        pair = self.pair
        out: list[ModelPoint] = []
        for p in pair.points:
            if len(p.on) < 2 and not include_smooth_marked:
                continue
            chain = root_chain(pair, p.id)
            if chain in self._by_chain:
                continue
            out.append(ModelPoint(p.id, frozenset(p.on), chain, p.id))
        for nid, node in self._nodes.items():
            chain = self._chain[nid]
            for b in sorted(node.incident):
                sat = chain.extend((f"E:{chain.depth - 1}", self._ref(b)))
                if sat in self._by_chain:
                    continue
                out.append(ModelPoint(nid, frozenset((nid, b)), sat, f"{nid}∩{b}"))
        return out

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return self.pair == other.pair and self.chains == other.chains

    def __hash__(self):
        return hash(self.chains)

    def __repr__(self):
        return f"Model({list(self._nodes)})"


def blow_up(model: Model, base, incident: Iterable[str], position_tag: str = "", node_id: str | None = None) -> Model:
    return model.blow_up(base, incident, position_tag, node_id)


class ModelDivisor:
    """A divisor on a model: coefficients on curves of X and exceptional nodes."""

    __slots__ = ("model", "_coeffs")

    def __init__(self, model: Model, coeffs: Mapping[str, Number] | None = None):
        self.model = model
        out = {}
        for k, v in (coeffs or {}).items():
            if k not in model.pair.curve and k not in model:
                raise ModelMismatch(f"branch {k!r} is not on the model")
            if v:
                out[k] = _normalize(v)
        order = {b: i for i, b in enumerate(model.branches())}
        self._coeffs = dict(sorted(out.items(), key=lambda kv: order[kv[0]]))

    @classmethod
    def from_divisor_on_x(cls, model: Model, div: DivisorOnX) -> "ModelDivisor":
        return cls(model, div.coeffs)

    @property
    def coeffs(self) -> dict[str, Number]:
        return dict(self._coeffs)

    def __getitem__(self, branch: str) -> Number:
        return self._coeffs.get(branch, 0)

    def items(self):
        return self._coeffs.items()

    def on_x(self) -> DivisorOnX:
        return DivisorOnX({k: v for k, v in self._coeffs.items() if k in self.model.pair.curve})

    def __eq__(self, other):
        if not isinstance(other, ModelDivisor):
            return NotImplemented
        return self.model == other.model and self._canonical() == other._canonical()

    def _canonical(self):
        m = self.model
        return frozenset(
            ((k if k in m.pair.curve else m.chain_of(k)), v) for k, v in self._coeffs.items()
        )

    def __add__(self, other: "ModelDivisor") -> "ModelDivisor":
        if other.model != self.model:
            raise ModelMismatch("divisors live on different models")
        out = dict(self._coeffs)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return ModelDivisor(self.model, out)

    def __mul__(self, scalar: Number) -> "ModelDivisor":
        return ModelDivisor(self.model, {k: scalar * v for k, v in self._coeffs.items()})

    __rmul__ = __mul__

    def __repr__(self):
        return f"ModelDivisor({format_divisor(self._coeffs)})"

    def __str__(self):
        return format_divisor(self._coeffs)


def _as_model_divisor(div, model_hint: Model | None = None) -> ModelDivisor:
    if isinstance(div, ModelDivisor):
        return div
    if hasattr(div, "divisor") and isinstance(div.divisor, ModelDivisor):
        return div.divisor
    if isinstance(div, DivisorOnX):
        if model_hint is None:
            raise ModelMismatch("a DivisorOnX needs the pair; pass a Model")
        return ModelDivisor(Model(model_hint.pair), div.coeffs)
    raise TypeError(f"cannot read {type(div).__name__} as a divisor")


def evaluate_chain(coeff: Callable[[str], Number], model: Model | None, chain: Chain) -> Number:
    """Multiplicity along the last exceptional curve of ``chain`` of the total
    transform of the divisor on ``model`` whose coefficients are ``coeff``."""
    values: list[Number] = []
    inside = model is not None
    for i, (refs, _) in enumerate(chain.steps):
        node = model.node_for(chain.prefix(i + 1)) if inside else None
        if node is not None:
            values.append(coeff(node))
            continue
        inside = False
        total: Number = 0
        for r in refs:
            if r[0] == "C":
                total += coeff(r[2:])
            else:
                total += values[int(r[2:])]
        values.append(total)
    return values[-1]


def evaluate(div, v: DivValuation, pair: SurfacePair | None = None) -> Number:
    """Value at ``v`` of a divisor on X, a model divisor, or a Cartier b-divisor."""
    if isinstance(div, DivisorOnX):
        if v.is_prime:
            return div[v.curve]
        return evaluate_chain(div.__getitem__, None, v.chain)
    md = _as_model_divisor(div)
    if v.is_prime:
        return md[v.curve]
    return evaluate_chain(md.__getitem__, md.model, v.chain)


def total_transform(div, target: Model) -> ModelDivisor:
    """Pull ``div`` back to ``target``, which must extend the divisor's model."""
    if isinstance(div, DivisorOnX):
        source = Model(target.pair)
        src = ModelDivisor(source, div.coeffs)
    else:
        src = _as_model_divisor(div)
        source = src.model
    if source.pair != target.pair or not source.chains <= target.chains:
        raise ModelMismatch("target model does not extend the divisor's model")
    out: dict[str, Number] = {c: src[c] for c in target.pair.curve}
    for node in target.nodes:
        chain = target.chain_of(node.id)
        src_node = source.node_for(chain)
        if src_node is not None:
            out[node.id] = src[src_node]
        else:
            out[node.id] = sum((out[b] for b in node.incident), 0)
    return ModelDivisor(target, out)


def pushforward(div: ModelDivisor, target: Model) -> ModelDivisor:
    """Forget exceptional components of nodes that are not in ``target``."""
    if div.model.pair != target.pair or not target.chains <= div.model.chains:
        raise ModelMismatch("target is not a sub-model of the divisor's model")
    out: dict[str, Number] = {}
    for k, v in div.items():
        if k in target.pair.curve:
            out[k] = v
        else:
            tn = target.node_for(div.model.chain_of(k))
            if tn is not None:
                out[tn] = v
    return ModelDivisor(target, out)


def incarnation(Z, W: Model) -> ModelDivisor:
    """The component on ``W`` of the b-divisor determined by ``Z``."""
    return ModelDivisor(W, {b: evaluate(Z, W.valuation(b)) for b in W.branches()})


def model_valuations(model: Model) -> list[DivValuation]:
    return [model.valuation(b) for b in model.branches()]


def probe_chains(model: Model, depth: int, d_only: bool = True) -> list[Chain]:
    """Chains obtained from ``model`` by at most ``depth`` further blow-ups.

    Starting centres are the two-branch points of the model together with one
    general point of each branch; with ``d_only`` only centres on the total
    transform of D are used.  Deeper steps take every satellite point and one
    free point of the newest exceptional curve.
    """
    if depth <= 0:
        return []
    pair = model.pair
    starts: list[Chain] = []
    for pt in model.points():
        if d_only and not any(model.is_d_branch(b) for b in pt.branches):
            continue
        starts.append(pt.chain)
    for b in model.branches():
        if d_only and not model.is_d_branch(b):
            continue
        if b in pair.curve:
            starts.append(root_chain(pair, FreePoint(b, "probe")))
        else:
            ch = model.chain_of(b)
            starts.append(ch.extend((f"E:{ch.depth - 1}",), "probe"))
    out: list[Chain] = []
    frontier = starts
    for level in range(depth):
        out.extend(frontier)
        if level + 1 < depth:
            frontier = [c for ch in frontier for c in ch.children()]
    return out


def probe_valuations(model: Model, depth: int, d_only: bool = True) -> list[DivValuation]:
    """The model's own branch valuations followed by the probe valuations."""
    own = [v for v in model_valuations(model) if not d_only or _on_d(model, v)]
    return own + [DivValuation.exceptional(c) for c in probe_chains(model, depth, d_only)]


def _on_d(model: Model, v: DivValuation) -> bool:
    if v.is_prime:
        return model.pair.in_D(v.curve)
    return model.over_D(v.chain)


def chain_is_over_d(pair: SurfacePair, chain: Chain) -> bool:
    return any(pair.in_D(c) for c in chain.root_curves)


def iter_chain_valuations(chain: Chain) -> Iterator[DivValuation]:
    for n in range(1, chain.depth + 1):
        yield DivValuation.exceptional(chain.prefix(n))


__all__ = [
    "Chain",
    "DivValuation",
    "FreePoint",
    "InfNearNode",
    "Model",
    "ModelDivisor",
    "ModelPoint",
    "blow_up",
    "evaluate",
    "evaluate_chain",
    "incarnation",
    "probe_chains",
    "probe_valuations",
    "pushforward",
    "root_chain",
    "total_transform",
    "model_valuations",
]
