"""Real-polarization quantization of spin on a finite comb Hilbert space."""

from .errors import (
    InvalidDensityMatrixError,
    InvalidStateError,
    NonPositiveReconstructionWarning,
    ParamsMismatchError,
    ReconstructionError,
    SchemaError,
    SpinPhaseError,
)
from .hilbert import (
    DensityMatrix,
    HilbertParams,
    MomentumVector,
    PhasePoint,
    StateVector,
    density_from_state,
    dft_forward,
    dft_inverse,
    inner,
    mix,
    truncate,
)
from .operators import (
    FactorizedSymbol,
    RotationSpec,
    SpinOperatorSet,
    build_spin_operators,
    classical_S,
    rotate_state_z,
    rotation_operator,
    spin_coherent_state,
    weyl_quantize,
)
from .sphere import (
    MultipoleCoeffs,
    SO3Quadrature,
    SpherePoint,
    TomographyMap,
    averaged_wigner,
    covariance_check,
    evaluate_sphere,
    haar_quadrature,
    reconstruct,
    tomography_matrix,
)
from .wigner import (
    WignerLattice,
    marginal_phi,
    marginal_xi,
    wigner_from_density,
    wigner_from_momentum,
    wigner_from_position,
)

__version__ = "0.1.0"
