"""Small surfaces shared by the unit tests."""

from bdiv_irr.connection import Combination, ExpConnection, ExpSummand
from bdiv_irr.geometry import Curve, MarkedPoint, SurfacePair


def three_lines(d=("Lx", "Ly", "Lz"), extra_points=()):
    """P² with three coordinate lines; ``d`` lists the lines belonging to D."""
    curves = tuple(Curve(c, 0, c in d) for c in ("Lx", "Ly", "Lz"))
    points = (
        MarkedPoint("Pxy", ("Lx", "Ly")),
        MarkedPoint("Pxz", ("Lx", "Lz")),
        MarkedPoint("Pyz", ("Ly", "Lz")),
    ) + tuple(extra_points)
    return SurfacePair(3, curves, points)


def conn(pair, *summands, name="M"):
    """summands: (exponents, rank, tag) or (None, rank) for a regular summand."""
    out = []
    for s in summands:
        exps, rank = s[0], s[1]
        tag = s[2] if len(s) > 2 else "c"
        value = Combination.zero() if exps is None else Combination.monomial(exps, tag)
        out.append(ExpSummand(value, rank))
    return ExpConnection(pair, tuple(out), name)
