from .cayley import (
    Mode, ConnectionSet, FiniteGraph, ResidueSet,
    validate, component_count, ball, torus, residue_window,
)
