"""Multilevel diversity coding with secure regeneration, exactly.

A desk-scale laboratory: product-matrix level codes at the
minimum-bandwidth point, separate coding into multi-level systems,
rank-based secrecy audits, exact rational outer bounds, and an
inequality checker that replays the converse machinery on concrete
instantiations.
"""

from .bounds import (
    NormalizedRates,
    TradeoffPoint,
    bound_beta,
    bound_general,
    bound_l1_zero,
    bound_prior,
    dominance,
    intersection_check,
    level_capacity,
    mbr_point,
    region_export,
)
from .galois import FieldMatrix, FieldModulus, vandermonde
from .secrecy import EavesdropperSpec, audit_all, leakage, observation_of
from .system import NodeShare, System, SystemParams, build_system, minimal_file_sizes

__all__ = [
    "EavesdropperSpec",
    "FieldMatrix",
    "FieldModulus",
    "NodeShare",
    "NormalizedRates",
    "System",
    "SystemParams",
    "TradeoffPoint",
    "audit_all",
    "bound_beta",
    "bound_general",
    "bound_l1_zero",
    "bound_prior",
    "build_system",
    "dominance",
    "intersection_check",
    "leakage",
    "level_capacity",
    "mbr_point",
    "minimal_file_sizes",
    "observation_of",
    "region_export",
    "vandermonde",
]

__version__ = "0.1.0"
