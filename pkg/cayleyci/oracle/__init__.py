from .isomorphism import Permutation, graph_iso, automorphism_group, automorphisms_fixing
from .finite_ci import (
    cayley_graph, complement_set, ci_check_finite, finite_ci_group_scan, RegularCopy, RegularCopyAnalyzer,
    NonCIPair, mod5_demo, mod5_map,
)
