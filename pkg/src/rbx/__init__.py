"""Exact computations for relative Rota-Baxter operators on Lie algebras.

Structures and checks, the controlling cohomologies with their long exact
sequences, infinitesimal deformations, triangular Lie bialgebras and the
graded (homotopy) versions, all over the rationals.
"""

from .foundation import Matrix, Q, fmt
from .nrcore import Cochain, nr_bracket
from .structures import (RBO, LieAlgebra, RelativeRBO, Report, Representation, mc_check, prelie_from_rbo,
                         verify_lie, verify_rbo, verify_relative_rbo, verify_rep)
from .cohomology import build_complex, les_check
from .bialgebra import Polyvector, TriangularBialgebra, cybe_check
from .homotopy import (GradedMap, GradedSpace, HomotopyRBO, LinftyAlgebra, LinftyRep, PreLieInfty,
                       verify_homotopy_rbo, verify_linfty, verify_linfty_rep, verify_prelie)
from .fileformat import example, examples_registry, load, loads, dumps

__all__ = [
    "Matrix", "Q", "fmt", "Cochain", "nr_bracket",
    "LieAlgebra", "Representation", "RelativeRBO", "RBO", "Report",
    "verify_lie", "verify_rep", "verify_relative_rbo", "verify_rbo", "mc_check", "prelie_from_rbo",
    "build_complex", "les_check",
    "Polyvector", "TriangularBialgebra", "cybe_check",
    "GradedSpace", "GradedMap", "LinftyAlgebra", "LinftyRep", "HomotopyRBO", "PreLieInfty",
    "verify_linfty", "verify_linfty_rep", "verify_homotopy_rbo", "verify_prelie",
    "example", "examples_registry", "load", "loads", "dumps",
]
