"""Anomaly indicators for fermionic topological orders with symmetry."""

from .algebra import central_charge, check_super_modular, invariants, s_matrix, twists
from .axioms import check_all, check_hexagon, check_pentagon, check_unitarity
from .core import EPS, FusionRules, Report, SuperMTC, dump_category, load_category, validate_structure
from .indicators import (
    IndicatorResult,
    anomaly_class,
    indicator_epin,
    indicator_pin_plus,
    partition_cp2,
    partition_s2s2,
    partition_s4,
    tenfold_report,
)
from .symmetry import FermionicSymmetry, SymmetryAction, check_action, load_action

__version__ = "0.1.0"

__all__ = [
    "EPS",
    "FermionicSymmetry",
    "FusionRules",
    "IndicatorResult",
    "Report",
    "SuperMTC",
    "SymmetryAction",
    "anomaly_class",
    "central_charge",
    "check_action",
    "check_all",
    "check_hexagon",
    "check_pentagon",
    "check_super_modular",
    "check_unitarity",
    "dump_category",
    "indicator_epin",
    "indicator_pin_plus",
    "invariants",
    "load_action",
    "load_category",
    "partition_cp2",
    "partition_s2s2",
    "partition_s4",
    "s_matrix",
    "tenfold_report",
    "twists",
    "validate_structure",
]
