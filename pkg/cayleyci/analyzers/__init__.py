from .symmetry import (
    HAut, SymmetryGroup, set_stabilizer, transporter, extends_to_ambient,
    lattice_transporter, ambient_transporter,
)
from .quotient import (
    QuotientGroup, ProductCertificate, congruence_image, product_condition,
    quotient_order, congruence_described_order,
)
from .decision import (
    UNCERTAIN, Reason, IsoKind, CiVerdict, IsoWitness, Witness, Linearity,
    decide_ci, non_ci_witness, are_isomorphic, z_iso_decide, verify_linearity,
    torus_normality, equivariance_check,
)
from .certificates import verify_certificate
