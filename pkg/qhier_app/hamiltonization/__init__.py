from qhier_app.hamiltonization.ehrenfest import ehrenfest_reduce
from qhier_app.hamiltonization.integrators import Trajectory, integrate_symplectic
from qhier_app.hamiltonization.phase_space import (
    ClassicalSystem,
    ObservableField,
    PhaseSpacePoint,
    hamilton_vector_field,
    hamiltonize,
    jacobi_residual_classical,
    poisson_bracket_classical,
    poisson_dynamics_residual,
)
