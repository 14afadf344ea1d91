from qhier_app.hierarchy.chain import (
    HierarchyChain,
    HierarchyLevel,
    build_chain,
    energy_match_state,
    lift,
    mixed_energy_match,
    root_level,
)
from qhier_app.hierarchy.demos import oscillator_demo, potential_demo, qubit_demo
from qhier_app.hierarchy.spectra import spectrum_compare
