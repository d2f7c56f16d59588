"""Classical theta functions, theta vectors on quantum tori and quantum theta
functions built from algebra-valued inner products."""

from .classical import TruncationPolicy, ftilde, gaussian, kq_transform, theta, theta_with_tail
from .errors import (
    DimensionMismatch,
    ImNotPositiveDefinite,
    IrrationalBasis,
    NcThetaError,
    NotIntegrable,
    NotSymmetric,
    PointNotInLattice,
    ValidationError,
)
from .heisenberg import (
    ConnectionSpec,
    GaussianVector,
    build_T,
    curvature_scalar,
    holomorphic_residual,
    pi_act,
    theta_vector,
)
from .lattice import (
    ComplexStructure,
    Lattice,
    LatticePoint,
    PhasePoint,
    cocycle_alpha,
    complexify,
    dual_lattice,
    hermitian_H,
    symplectic_pairing,
    validate_structure,
)
from .quantum import (
    QuantumThetaParams,
    X_pairing,
    H_c,
    functional_equation_defect,
    manin_theta,
    normalization_defect,
    quantum_translate,
    shifted_theta,
)
from .twisted import (
    AnalyticElement,
    TwistedElement,
    delta,
    gaussian_pairing,
    inner_product_D,
    inner_product_Dperp,
    multiply,
    quadrature_pairing,
)

__version__ = "0.1.0"
