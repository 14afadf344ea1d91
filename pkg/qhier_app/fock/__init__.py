from qhier_app.fock.quantize import (
    heisenberg_field_residual,
    observable_heisenberg_residual,
    one_excitation_block,
    quantum_poisson_bracket,
    second_quantize_hamiltonian,
    second_quantize_observable,
)
from qhier_app.fock.space import FockOperator, FockSpace, build_fock_space, ladder_matrix
from qhier_app.fock.states import SecondQuantizedState, second_quantize_state, von_neumann_residual
from qhier_app.fock.statistics import check_statistics
