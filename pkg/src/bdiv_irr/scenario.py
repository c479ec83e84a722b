"""Scenario files: a surface pair, named connections, named divisors, options.

The format is JSON and strict: unknown keys are rejected so that typos fail
loudly instead of silently falling back to defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .connection import Combination, ExpConnection, ExpSummand, exp_key, validate_connection
from .errors import ParseError, UnknownCurveRef, ValidationError
from .geometry import Curve, DivisorOnX, MarkedPoint, SurfacePair, validate_pair


@dataclass(frozen=True)
class Options:
    probe_depth: int = 3
    max_blowups: int = 64


@dataclass
class Scenario:
    surface: SurfacePair
    connections: dict[str, ExpConnection] = field(default_factory=dict)
    divisors: dict[str, DivisorOnX] = field(default_factory=dict)
    options: Options = Options()

    def connection(self, name: str | None = None) -> ExpConnection:
        if name is None:
            if not self.connections:
                raise ValidationError("scenario has no connections", rule="NoConnection")
            return next(iter(self.connections.values()))
        if name not in self.connections:
            raise ValidationError(f"no connection named {name!r}", rule="UnknownConnection")
        return self.connections[name]

    def divisor(self, name: str) -> DivisorOnX:
        if name not in self.divisors:
            raise ValidationError(f"no divisor named {name!r}", rule="UnknownDivisor")
        return self.divisors[name]


def _check_keys(obj: Any, where: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise ValidationError(f"{where} must be an object", rule="SchemaType")
    unknown = sorted(set(obj) - required - set(optional))
    if unknown:
        raise ValidationError(f"{where}: unknown key(s) {unknown}", rule="UnknownKey")
    missing = sorted(required - set(obj))
    if missing:
        raise ValidationError(f"{where}: missing key(s) {missing}", rule="MissingKey")
    return obj


def _int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ValidationError(f"{where} must be an integer", rule="SchemaType")
    return x


def _str(x: Any, where: str) -> str:
    if not isinstance(x, str) or not x:
        raise ValidationError(f"{where} must be a nonempty string", rule="SchemaType")
    return x


def _exponents(obj: Any, where: str, pair: SurfacePair) -> dict[str, int]:
    if not isinstance(obj, dict):
        raise ValidationError(f"{where} must be an object", rule="SchemaType")
    out = {}
    for c, e in obj.items():
        if c not in pair.curve:
            raise UnknownCurveRef(f"{where}: unknown curve {c!r}")
        out[c] = _int(e, f"{where}.{c}")
    return out


def _coeff(obj: Any, where: str) -> dict[str, int]:
    if isinstance(obj, str) and obj:
        return {obj: 1}
    if isinstance(obj, dict) and obj:
        return {_str(t, where): _int(n, f"{where}.{t}") for t, n in obj.items()}
    raise ValidationError(f"{where} must be a tag or a tag->integer object", rule="SchemaType")


def _summand(obj: Any, where: str, pair: SurfacePair) -> ExpSummand:
    if isinstance(obj, dict) and "terms" in obj:
        _check_keys(obj, where, {"rank", "terms"})
        if not isinstance(obj["terms"], list):
            raise ValidationError(f"{where}.terms must be a list", rule="SchemaType")
        acc: dict = {}
        for i, t in enumerate(obj["terms"]):
            tw = f"{where}.terms[{i}]"
            _check_keys(t, tw, {"exponents", "coeff"})
            key = exp_key(_exponents(t["exponents"], tw + ".exponents", pair))
            tags = acc.setdefault(key, {})
            for tag, n in _coeff(t["coeff"], tw + ".coeff").items():
                tags[tag] = tags.get(tag, 0) + n
        value = Combination.build(acc)
    else:
        _check_keys(obj, where, {"rank", "exponents"}, {"coeff"})
        exps = _exponents(obj["exponents"], where + ".exponents", pair)
        tags = _coeff(obj.get("coeff", "c"), where + ".coeff")
        value = Combination.build({exp_key(exps): tags})
    return ExpSummand(value, _int(obj["rank"], where + ".rank"))


def scenario_from_dict(data: Any) -> Scenario:
    _check_keys(data, "scenario", {"surface"}, {"connections", "divisors", "options"})
    surf = _check_keys(data["surface"], "surface", {"euler_characteristic", "curves"}, {"points"})
    if not isinstance(surf["curves"], list) or not isinstance(surf.get("points", []), list):
        raise ValidationError("surface.curves and surface.points must be lists", rule="SchemaType")
    curves = []
    for i, c in enumerate(surf["curves"]):
        w = f"surface.curves[{i}]"
        _check_keys(c, w, {"id"}, {"genus", "in_D"})
        in_d = c.get("in_D", True)
        if not isinstance(in_d, bool):
            raise ValidationError(f"{w}.in_D must be a boolean", rule="SchemaType")
        curves.append(Curve(_str(c["id"], w + ".id"), _int(c.get("genus", 0), w + ".genus"), in_d))
    points = []
    for i, p in enumerate(surf.get("points", [])):
        w = f"surface.points[{i}]"
        _check_keys(p, w, {"id", "on"})
        if not isinstance(p["on"], list):
            raise ValidationError(f"{w}.on must be a list", rule="SchemaType")
        points.append(MarkedPoint(_str(p["id"], w + ".id"), tuple(_str(x, w + ".on") for x in p["on"])))
    pair = SurfacePair(_int(surf["euler_characteristic"], "surface.euler_characteristic"), tuple(curves), tuple(points))
    validate_pair(pair)

    connections = {}
    conns = data.get("connections", {})
    if not isinstance(conns, dict):
        raise ValidationError("connections must be an object", rule="SchemaType")
    for name, body in conns.items():
        w = f"connections.{name}"
        _check_keys(body, w, {"summands"})
        if not isinstance(body["summands"], list):
            raise ValidationError(f"{w}.summands must be a list", rule="SchemaType")
        summands = tuple(_summand(s, f"{w}.summands[{i}]", pair) for i, s in enumerate(body["summands"]))
        M = ExpConnection(pair, summands, name)
        validate_connection(M)
        connections[name] = M

    divisors = {}
    divs = data.get("divisors", {})
    if not isinstance(divs, dict):
        raise ValidationError("divisors must be an object", rule="SchemaType")
    for name, body in divs.items():
        divisors[name] = DivisorOnX(_exponents(body, f"divisors.{name}", pair))

    opts = _check_keys(data.get("options", {}), "options", set(), {"probe_depth", "max_blowups"})
    options = Options(
        _int(opts.get("probe_depth", 3), "options.probe_depth"),
        _int(opts.get("max_blowups", 64), "options.max_blowups"),
    )
    if options.probe_depth < 1 or options.max_blowups < 1:
        raise ValidationError("probe_depth and max_blowups must be positive", rule="BadOption")
    return Scenario(pair, connections, divisors, options)


def parse_scenario_text(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return scenario_from_dict(data)


def parse_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario_text(text)


def _summand_to_dict(s: ExpSummand) -> dict:
    terms = s.value.terms
    if len(terms) == 1 and len(terms[0][1]) == 1 and terms[0][1][0][1] == 1:
        key, ((tag, _),) = terms[0]
        return {"rank": s.rank, "exponents": dict(key), "coeff": tag}
    if not terms:
        return {"rank": s.rank, "terms": []}
    out = []
    for key, tags in terms:
        coeff: Any = tags[0][0] if len(tags) == 1 and tags[0][1] == 1 else dict(tags)
        out.append({"exponents": dict(key), "coeff": coeff})
    return {"rank": s.rank, "terms": out}


def scenario_to_dict(sc: Scenario) -> dict:
    pair = sc.surface
    return {
        "surface": {
            "euler_characteristic": pair.chi_top,
            "curves": [{"id": c.id, "genus": c.genus, "in_D": c.in_D} for c in pair.curves],
            "points": [{"id": p.id, "on": list(p.on)} for p in pair.points],
        },
        "connections": {
            name: {"summands": [_summand_to_dict(s) for s in M.summands]}
            for name, M in sc.connections.items()
        },
        "divisors": {name: dict(d.items()) for name, d in sc.divisors.items()},
        "options": {"probe_depth": sc.options.probe_depth, "max_blowups": sc.options.max_blowups},
    }


def serialize_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2) + "\n"


__all__ = [
    "Options",
    "Scenario",
    "parse_scenario",
    "parse_scenario_text",
    "scenario_from_dict",
    "scenario_to_dict",
    "serialize_scenario",
]
