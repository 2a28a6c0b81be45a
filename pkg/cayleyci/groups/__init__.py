from .abelian import FiniteAbelianGroup, GroupHom, GroupAutomorphism, aut_group_elements
from .torsion import AbelianChain, ChainExtension, extend_automorphism, restrict, chain_extend
