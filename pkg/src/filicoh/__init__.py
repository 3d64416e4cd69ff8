"""Exact cohomology and deformation calculus for N-graded filiform Lie algebras.

The library computes weight-graded adjoint 1- and 2-cohomology of the
infinite dimensional algebras m0, m2 and L1 (and user-supplied graded rules)
by exact finite truncation, extracts canonical representatives, evaluates the
graded bracket on degree-1 classes, and runs the order-by-order obstruction
calculus that sorts infinitesimal deformations into true, formal and
obstructed ones.
"""
from .algebra import (BracketTable, GradedLieAlgebra, JacobiReport,
                      abelian_ideal_floor, load_algebra, preset,
                      resolve_algebra, verify_jacobi)
from .cochain import (HomogeneousCochain, differential, differential_row,
                      legal_keys, massey_square, massey_square_window,
                      massey_term, nr_bracket)
from .cohomology import (CohomologyReport, DEFAULT_WINDOW, TruncationWindow,
                         coboundary_basis, cocycle_basis, cohomology, family,
                         h1_bracket, h1_generators, is_coboundary)
from .deform import (DeformationSeries, NonconvergenceWitness,
                     ObstructionReport, classify_weight, deformation_table,
                     deformed_algebra, nonconvergence_witness,
                     obstruction_report, prolong)
from .errors import (ConfigError, FilicohError, NotACocycleError,
                     UnstableError, UsageError)

__version__ = "0.1.0"

__all__ = [
    "BracketTable", "CohomologyReport", "ConfigError", "DEFAULT_WINDOW",
    "DeformationSeries", "FilicohError", "GradedLieAlgebra",
    "HomogeneousCochain", "JacobiReport", "NonconvergenceWitness",
    "NotACocycleError", "ObstructionReport", "TruncationWindow",
    "UnstableError", "UsageError", "abelian_ideal_floor", "classify_weight",
    "coboundary_basis", "cocycle_basis", "cohomology", "deformation_table",
    "deformed_algebra", "differential", "differential_row", "family",
    "h1_bracket", "h1_generators", "is_coboundary", "legal_keys",
    "load_algebra", "massey_square", "massey_square_window", "massey_term",
    "nonconvergence_witness", "nr_bracket", "obstruction_report", "preset",
    "prolong", "resolve_algebra", "verify_jacobi",
]
