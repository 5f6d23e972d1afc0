from .basis import Basis, build_basis
from .assembly import (
    GalerkinSystem,
    SimParams,
    SystemMatrices,
    assemble_system,
    build_system,
    cavity_panels,
    connecting_field,
    kinetic_energy,
    penalization_form,
    quadratic_form,
)
from .scheme import (
    GalerkinState,
    LedgerRow,
    SimulationResult,
    TrajectoryRecord,
    default_radius,
    existence_horizon,
    initial_state,
    picard_step,
    run_simulation,
)
