"""Planar laboratory for fixed point index computations in the quadrant."""
from .planar import (
    HomotopyConfig,
    HomotopyReport,
    Ledger,
    MultiplicityReport,
    PlanarMap,
    Rect,
    certify_behavior,
    homotopy_invariance_probe,
    ledger_check,
    multiplicity_probe,
    winding_degree,
)
from .fixtures import SUITES, run_suite

__all__ = [
    "HomotopyConfig", "HomotopyReport", "Ledger", "MultiplicityReport", "PlanarMap", "Rect",
    "SUITES", "certify_behavior", "homotopy_invariance_probe", "ledger_check",
    "multiplicity_probe", "run_suite", "winding_degree",
]
