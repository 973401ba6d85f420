"""Extended and conventional dynamics of a charged relativistic particle."""
from .functionals import (
    ConventionalHamiltonian,
    LegendreReport,
    constraint_residuals,
    conventional_hamiltonian_em,
    conventional_lagrangian_em,
    em_hamiltonian,
    extended_hamiltonian_em,
    extended_lagrangian_em,
    free_particle_hj_action,
    hessian_determinant,
    hessian_matrix,
    hj_residual,
    kinetic_momentum,
    legendre_roundtrip_check,
    nonrelativistic_hamiltonian_em,
    nonrelativistic_lagrangian_em,
    point_from_momentum,
    point_from_velocity,
)
from .integrate import (
    ConventionalTrajectory,
    TrajectoryRecord,
    classical_action,
    conventional_rhs,
    extended_rhs,
    free_classical_action,
    gamma_identity_residual,
    integrate_conventional,
    integrate_extended,
    reparameterize_to_t,
    trivial_extended_flow,
)
from .scenarios import (
    Scenario,
    cyclotron_oracle,
    cyclotron_scenario,
    free_scenario,
    hyperbolic_oracle,
    hyperbolic_scenario,
    reference_scenarios,
)
from .io import (
    CONVENTIONAL_COLUMNS,
    TRAJECTORY_COLUMNS,
    read_trajectory_csv,
    trajectory_to_json,
    write_conventional_csv,
    write_trajectory_csv,
)
from .state import ConstraintReport, ExtendedPhasePoint, ExtendedVelocity, ParticleParams
