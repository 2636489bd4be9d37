"""Exact computations in the odd Kontsevich graph complex and its hairy
variants: bases, differentials, cohomology tables and pairing certificates."""

from .complexes import (Certificate, ComplexSpec, DimensionTable, Engine, NoPairInWindow, Window,
                        cancellation_pair, check_identity, cohomology_dims, euler_check, gc_table,
                        quasi_iso_check, verify_acyclic)
from .graphs import (BasisElement, Grading, LabeledGraph, ParseError, canonicalize, decode, encode,
                     generate_basis)
from .linalg import SparseMatrix, kernel_basis, rank, rank_auto, solve
from .operators import Delta, GraphVector, apply_map, assemble_matrix, beta, chi, delta

__version__ = "0.1.0"
