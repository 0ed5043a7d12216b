"""Gaussian Lyapunov dynamics, phase-space entropy production and non-linear Onsager relations."""

from .dynamics import (
    StabilityReport,
    Trajectory,
    integrate,
    lyapunov_rhs,
    rotating_frame,
    rotating_frame_system,
    stability,
    steady_state,
)
from .errors import (
    ConsistencyError,
    DimensionError,
    DomainError,
    GaussOnsagerError,
    InstabilityError,
    IntegrationError,
    NumericalError,
    SingularMatrixError,
    UnsupportedError,
    ValidationError,
)
from .model import (
    DampingMatrix,
    EnvCovMatrix,
    GaussianMap,
    LyapunovSystem,
    bona_fide_check,
    cptp_check,
    diffusion_from_env,
    squeezed_thermal_cm,
    symplectic_form,
    thermal_cm,
)
from .thermo import (
    ThermoSample,
    asymmetry_residual,
    entropy_flux,
    entropy_production,
    entropy_rate,
    flow_matrix,
    linear_response_production,
    production_from_flow,
    production_matrix,
    renyi2_entropy,
    scalar_onsager,
    thermo_sample,
)

__version__ = "0.1.0"
