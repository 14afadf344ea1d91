from qhier_app.hilbert.core import (
    Operator,
    SpaceShape,
    StateVector,
    apply_local,
    direct_sum,
    embed_local,
    evolve_exact,
    expectation,
    kron,
    partial_trace,
    propagator,
    reduced_density,
)
