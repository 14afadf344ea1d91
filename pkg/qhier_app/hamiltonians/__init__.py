from qhier_app.hamiltonians.builders import chain_edges, heisenberg_model, random_model
from qhier_app.hamiltonians.hspec import parse_spec, render_spec, summary_table
from qhier_app.hamiltonians.model import (
    KLocalHamiltonian,
    LocalTerm,
    assemble_full,
    embed_in_higher_locality,
    energy,
    group_by_locality,
    validate,
)
