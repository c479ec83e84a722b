"""Seeded generators of random curve configurations and connections."""

from __future__ import annotations

import random

from .connection import Combination, ExpConnection, ExpSummand
from .geometry import Curve, DivisorOnX, MarkedPoint, SurfacePair
from .scenario import Options, Scenario
from .valtree import Chain, FreePoint, root_chain


def random_pair(rng: random.Random, max_curves: int = 6) -> SurfacePair:
    n = rng.randint(1, max_curves)
    curves = []
    for i in range(n):
        genus = 1 if rng.random() < 0.2 else 0
        curves.append(Curve(f"C{i + 1}", genus, rng.random() < 0.7))
    if not any(c.in_D for c in curves):
        curves[0] = Curve(curves[0].id, curves[0].genus, True)
    points = []
    for i in range(n):
        for j in range(i + 1, n):
            for _ in range(rng.choice((0, 1, 1, 2))):
                points.append(MarkedPoint(f"P{len(points) + 1}", (curves[i].id, curves[j].id)))
    for _ in range(rng.randint(0, 2)):
        c = rng.choice(curves)
        points.append(MarkedPoint(f"P{len(points) + 1}", (c.id,)))
    return SurfacePair(rng.randint(-2, 6), tuple(curves), tuple(points))


def random_exponents(rng: random.Random, pair: SurfacePair, bound: int = 4) -> dict[str, int]:
    out = {}
    for c in pair.curves:
        if rng.random() < 0.5:
            continue
        e = rng.randint(-bound, bound)
        if e < 0 and not c.in_D:
            e = -e
        if e:
            out[c.id] = e
    return out


def random_connection(
    rng: random.Random, pair: SurfacePair, max_rank: int = 3, bound: int = 4, name: str = "M"
) -> ExpConnection:
    budget = rng.randint(1, max_rank)
    summands = []
    while budget > 0:
        rank = rng.randint(1, budget)
        budget -= rank
        tag = f"c{len(summands) + 1}"
        roll = rng.random()
        if roll < 0.1:
            value = Combination.zero()
        elif roll < 0.3 and summands and summands[-1].value:
            key = summands[-1].value.constituents[0]
            value = Combination.build({key: {tag: 1}})
        else:
            value = Combination.monomial(random_exponents(rng, pair, bound), tag)
        summands.append(ExpSummand(value, rank))
    return ExpConnection(pair, tuple(summands), name)


def random_scenario(rng: random.Random, max_curves: int = 6) -> Scenario:
    pair = random_pair(rng, max_curves)
    M = random_connection(rng, pair)
    return Scenario(pair, {"M": M}, {}, Options())


def random_divisor(rng: random.Random, pair: SurfacePair, max_coeff: int = 3, on_d: bool = True, effective: bool = True):
    pool = pair.d_curves if on_d else tuple(c.id for c in pair.curves)
    lo = 0 if effective else -max_coeff
    return DivisorOnX({c: rng.randint(lo, max_coeff) for c in pool})


def random_admissible_chain(rng: random.Random, pair: SurfacePair, Zdiv: DivisorOnX, max_len: int = 6) -> Chain:
    """A chain following the strict transform of one component of Zdiv."""
    c = rng.choice(sorted(Zdiv.support))
    roots = [p for p in pair.points_on(c)]
    if roots and rng.random() < 0.6:
        chain = root_chain(pair, rng.choice(roots))
    else:
        chain = root_chain(pair, FreePoint(c, "probe"))
    for _ in range(rng.randint(0, max_len - 1)):
        chain = chain.extend((f"E:{chain.depth - 1}", "C:" + c))
    return chain


def random_chain(rng: random.Random, pair: SurfacePair, max_len: int = 4, d_only: bool = True) -> Chain:
    """A random chain of blow-ups rooted on (the total transform of) D."""
    pool = [p.id for p in pair.points if not d_only or pair.on_D(p.id)]
    curves = [c for c in (pair.d_curves if d_only else [c.id for c in pair.curves])]
    if pool and rng.random() < 0.6:
        chain = root_chain(pair, rng.choice(pool))
    else:
        chain = root_chain(pair, FreePoint(rng.choice(curves), "probe"))
    for _ in range(rng.randint(0, max_len - 1)):
        chain = rng.choice(chain.children())
    return chain


__all__ = [
    "random_admissible_chain",
    "random_chain",
    "random_connection",
    "random_divisor",
    "random_exponents",
    "random_pair",
    "random_scenario",
]
