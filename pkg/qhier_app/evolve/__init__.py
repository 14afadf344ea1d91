from qhier_app.evolve.engines import (
    EvolveSource,
    Series,
    initial_state,
    resolve_source,
    run_exact,
    run_lindblad,
    run_sse,
    run_symplectic,
)
