from .profile import ConnectParams, cutoff, cutoff_derivative
from .grid import AnnulusField, AnnulusGrid, require_resolution
from .blend import blend_tangential
from .divergence import divergence_residual, flux_defect, solve_divergence_correction
from .harmonic import HarmonicPotential, harmonic_neumann
from .velocity import (
    ConnectedVelocity,
    NormalFluxCorrector,
    StreamConnection,
    connect_velocity,
    normal_flux_corrector,
    rigid_stream,
    stream_connection,
)
from .testfn import ApproximateTestFunction, approximate_test_function
from .rigidify import RigidifiedVelocity, rigidify
