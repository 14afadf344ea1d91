from qhier_app.eclectic.local import extract_local_state, local_energy, partial_amplitudes
from qhier_app.eclectic.many_body import separable_form, separable_gap_report, second_quantized_many_body
from qhier_app.eclectic.system import (
    EclecticState,
    EclecticSystem,
    build_eclectic,
    dimension_report,
    eclectic_state,
    verify_energy_identity,
)
