"""Command line entry point: ``bdiv-irr <command> --scenario <path> ...``.

Exit codes: 0 success, 1 a mathematical consistency check failed (or a
mathematical precondition was violated), 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import report
from .errors import InputError, MathError
from .geometry import euler_open_complement
from .scenario import Scenario, parse_scenario

COMMANDS = ("validate", "irr", "delta", "turning", "cc", "chi", "bounds", "check", "report")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bdiv-irr", description="Irregularity b-divisors of exponential connections.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--connection", help="connection name (default: all)")
    p.add_argument("--divisor", help="divisor name, used by the slope bound")
    p.add_argument("--probe-depth", type=int)
    p.add_argument("--max-blowups", type=int)
    p.add_argument("--format", choices=("text", "json", "dot"), default="text")
    return p


def _connections(sc: Scenario, name: str | None):
    if name is not None:
        return [sc.connection(name)]
    return list(sc.connections.values())


def _fmt_div(d: dict) -> str:
    terms = [k if v == 1 else f"{v}*{k}" for k, v in d.items()]
    return " + ".join(terms) if terms else "0"


def _text_irr(s: dict) -> list[str]:
    out = [
        f"[{s['connection']}] rank {s['rank']}",
        f"Irr(X) = {_fmt_div(s['irr_on_X'])}",
        f"resolution: {s['resolution_nodes']} blow-ups, depth {s['resolution_depth']}",
    ]
    for n in s["nodes"]:
        out.append(f"  {n['id']:<5} over {n['over']:<8} {n['chain']:<24} irr={n['irr']} irr_end={n['irr_end']}")
    return out


def _text_delta(s: dict) -> list[str]:
    out = [f"[{s['connection']}] partial discrepancy of Irr"]
    for n in s["nodes"]:
        out.append(f"  {n['id']:<5} over {n['over']:<8} delta={n['delta']} delta_end={n['delta_end']}")
    for p, v in s["point_integrals"].items():
        out.append(f"  integral at {p}: {v}")
    out.append(
        f"  integral: all {s['integral_all']}, smooth locus {s['integral_smooth_locus']},"
        f" singular locus {s['integral_singular_locus']}"
    )
    return out


def _text_turning(s: dict) -> list[str]:
    out = [f"[{s['connection']}] turning points: {len(s['points'])}"]
    for p in s["points"]:
        out.append(f"  {p['id']}  {'D-singular' if p['d_singular'] else 'D-smooth'}")
    return out


def _text_cc(s: dict) -> list[str]:
    c = s["cycle"]
    out = [f"[{s['connection']}] characteristic cycle", f"  zero section: {c['zero_section']}"]
    for k, v in c["curves"].items():
        out.append(f"  conormal {k}: {v}")
    for k, v in c["points"].items():
        out.append(f"  point {k}: {v}")
    return out


def _text_chi(s: dict) -> list[str]:
    a, b = s["route_a"], s["route_b"]
    if s["consistent"]:
        return [f"chi = {a} (route A = route B = {a})"]
    return [f"chi MISMATCH (route A = {a}, route B = {b}) FAILED"]


def _text_bounds(s: dict) -> list[str]:
    out = [f"[{s['connection']}] bounds"]
    for r in s["reports"]:
        mark = "ok" if r["ok"] else "VIOLATED"
        out.append(f"  {r['name']}: {r['attained']} <= {r['bound']} [{mark}]")
    lf = s["lefschetz"]
    out.append(f"  K(Irr(X), rank) = {lf['K']} with non-normative L = {lf['polynomial']}")
    return out


def run(command: str, sc: Scenario, connection: str | None = None, divisor: str | None = None, fmt: str = "text"):
    """Return (output text, exit code)."""
    mb = sc.options.max_blowups
    ms = _connections(sc, connection)
    if fmt == "dot":
        if not ms:
            return 'digraph "empty" {\n}\n', 0
        return "".join(report.emit_dot(M, mb) for M in ms), 0

    payload: dict = {"command": command}
    lines: list[str] = []
    code = 0
    pair = sc.surface

    if command == "validate":
        payload.update(
            curves=len(pair.curves),
            points=len(pair.points),
            connections=list(sc.connections),
            divisors=list(sc.divisors),
            euler_open_complement=euler_open_complement(pair),
        )
        lines.append(
            f"ok: {len(pair.curves)} curves, {len(pair.points)} points,"
            f" {len(sc.connections)} connections, {len(sc.divisors)} divisors"
        )
    elif command == "check":
        payload["connections"] = {}
        for M in ms:
            res = report.consistency_checks(sc, M)
            payload["connections"][M.name] = [{"check": n, "passed": ok, "detail": d} for n, ok, d in res]
            for n, ok, d in res:
                lines.append(f"[{M.name}] {'PASS' if ok else 'FAIL'} {n}" + (f": {d}" if d and not ok else ""))
                if not ok:
                    code = 1
    else:
        sections = []
        for M in ms:
            if command in ("irr", "report"):
                sections.append(("irr", report.irr_section(M, mb)))
            if command in ("delta", "report"):
                sections.append(("delta", report.delta_section(M, mb)))
            if command in ("turning", "report"):
                sections.append(("turning", report.turning_section(M)))
            if command in ("cc", "report"):
                sections.append(("cc", report.cc_section(M, mb)))
            if command in ("chi", "report"):
                s = report.chi_section(M, mb)
                sections.append(("chi", s))
                if not s["consistent"]:
                    code = 1
            if command in ("bounds", "report"):
                s = report.bounds_section(sc, M, divisor)
                sections.append(("bounds", s))
                if not all(r["ok"] for r in s["reports"]):
                    code = 1
        render = {
            "irr": _text_irr,
            "delta": _text_delta,
            "turning": _text_turning,
            "cc": _text_cc,
            "chi": _text_chi,
            "bounds": _text_bounds,
        }
        payload["sections"] = [{"kind": k, **s} for k, s in sections]
        for k, s in sections:
            lines.extend(render[k](s))
        if command == "report":
            payload["consistency"] = "ok" if code == 0 else "FAILED"
            lines.append(f"consistency: {payload['consistency']}")

    if fmt == "json":
        return json.dumps(payload, indent=2, ensure_ascii=False, default=str) + "\n", code
    return "\n".join(lines) + "\n", code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = parse_scenario(args.scenario)
        opts = sc.options
        if args.probe_depth is not None:
            opts = replace(opts, probe_depth=args.probe_depth)
        if args.max_blowups is not None:
            opts = replace(opts, max_blowups=args.max_blowups)
        if opts.probe_depth < 1 or opts.max_blowups < 1:
            print("error: --probe-depth and --max-blowups must be positive", file=sys.stderr)
            return 2
        sc.options = opts
        text, code = run(args.command, sc, args.connection, args.divisor, args.format)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MathError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
