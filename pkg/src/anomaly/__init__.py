"""Gluing of Clifford-Fock bimodules along Lagrangian relations.

Submodules
----------
linalg      dense subspace arithmetic with tolerance control
rspace      complex spaces with real structure
lagrangian  Lagrangian relations and their composition
fock        Clifford algebras, Fock modules, Pfaffian lines, CAR operators
gluing      tensor products over Clifford algebras, gluing maps, coherence
toy         a lattice bordism category and its twist functor
suites, scenario, report, cli
            verification harness
"""
from .fock import BimoduleStructure, CliffordAlgebra, FockModule, car_operators, pfaffian_line
from .gluing import TensorOverClifford, coherence_check, development_map, glue_iso, swap_diagnostics, verify_glue
from .lagrangian import Lagrangian, compose, graph_lagrangian, is_lagrangian, qalpha_lagrangian, qalpha_scan
from .linalg import DEFAULT_TOL, Subspace, ToleranceConfig
from .rspace import RSpace, direct_sum, opposite

__version__ = "0.1.0"

__all__ = [
    "BimoduleStructure",
    "CliffordAlgebra",
    "FockModule",
    "car_operators",
    "pfaffian_line",
    "TensorOverClifford",
    "coherence_check",
    "development_map",
    "glue_iso",
    "swap_diagnostics",
    "verify_glue",
    "Lagrangian",
    "compose",
    "graph_lagrangian",
    "is_lagrangian",
    "qalpha_lagrangian",
    "qalpha_scan",
    "DEFAULT_TOL",
    "Subspace",
    "ToleranceConfig",
    "RSpace",
    "direct_sum",
    "opposite",
]
