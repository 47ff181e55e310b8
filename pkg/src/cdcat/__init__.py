"""Counter-diabatic cat-state generation in a bosonic Josephson junction."""

from .dynamics import (
    CdMode,
    HamiltonianAssembly,
    NormDriftError,
    PropagationResult,
    assemble_h,
    freeze_run,
    initial_state,
    propagate,
)
from .observables import (
    DiagnosticsSample,
    fidelity_to_subspace,
    incomplete_magnetization,
    order_parameter,
    qfi,
    residual_energy,
)
from .schedules import (
    PoleError,
    RampSpec,
    ScheduleConfigError,
    ScheduleDomainError,
    ScheduleSet,
    f_finite,
    f_infinite,
    gamma,
    gamma_dot,
    omega_finite,
    omega_infinite,
    potential,
)
from .spectrum import (
    DegenerateGroundStateError,
    GroundSubspace,
    eigs_lowest,
    ground_state,
    ground_subspace,
    population_distribution,
)
from .spin_ops import SpinOperator, build_cd_term, build_sx, build_sy, build_sz

__version__ = "0.1.0"
