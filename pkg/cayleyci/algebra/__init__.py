from .intlin import (
    IntMatrix, SmithDecomposition, snf, hnf, det, is_unimodular, solve_integer,
    inverse_unimodular, xgcd,
)
from .lattice import (
    Lattice, Cardinality, INFINITE, span, index, simultaneous_basis, standardize, coordinates,
)
