"""Irregularity b-divisors, partial discrepancies and characteristic cycles
of exponential-type connections on surface pairs (X, D), in exact arithmetic."""

from importlib.resources import files

from .bdivisor import CartierBDivisor, WeilBDivisor, delta_divisor, integral, is_nef_probe, partial_discrepancy_at
from .charcycle import LagrangianCycle, cc_connection, global_chi, index_pairing
from .connection import ExpConnection, irr_along, irr_bdivisor, resolve_turning_points, turning_locus
from .geometry import Curve, DivisorOnX, MarkedPoint, SurfacePair
from .scenario import Scenario, parse_scenario
from .valtree import Chain, DivValuation, Model

__all__ = [
    "CartierBDivisor",
    "Chain",
    "Curve",
    "DivValuation",
    "DivisorOnX",
    "ExpConnection",
    "LagrangianCycle",
    "MarkedPoint",
    "Model",
    "Scenario",
    "SurfacePair",
    "WeilBDivisor",
    "cc_connection",
    "delta_divisor",
    "fixture_path",
    "global_chi",
    "index_pairing",
    "integral",
    "irr_along",
    "irr_bdivisor",
    "is_nef_probe",
    "load_fixture",
    "parse_scenario",
    "partial_discrepancy_at",
    "resolve_turning_points",
    "turning_locus",
]

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path of a bundled scenario: ``"scen_a"``, ``"scen_b"`` or ``"scen_c"``."""
    return files(__package__) / "fixtures" / f"{name}.json"


def load_fixture(name: str) -> Scenario:
    return parse_scenario(fixture_path(name))
