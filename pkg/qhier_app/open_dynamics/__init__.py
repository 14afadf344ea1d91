from qhier_app.open_dynamics.kraus import KrausMap, kraus_apply
from qhier_app.open_dynamics.lift import second_quantized_lindblad_observable, second_quantized_lindblad_state
from qhier_app.open_dynamics.lindblad import (
    LindbladModel,
    amplitude_damping,
    lindblad_evolve,
    lindblad_step_halving,
    lindblad_trajectory,
)
from qhier_app.open_dynamics.sse import TrajectoryEnsemble, sse_ensemble, sse_trajectory_matrix
