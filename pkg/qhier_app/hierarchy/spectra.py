import numpy as np
import scipy.linalg

from qhier_app.config import settings
from qhier_app.exceptions import ValidationFailed
from qhier_app.fock.space import FockOperator
from qhier_app.hierarchy.chain import truncate_spectrum
from qhier_app.hierarchy.schemas import SSector, SSpectrumReport
from qhier_app.hilbert.core import MatrixLike, require_hermitian


def sector_spectra(h2: FockOperator) -> dict[int, np.ndarray]:
    if not h2.commutes_with_number():
        raise ValidationFailed('spectrum comparison needs a number-conserving operator')
    out = {}
    for total in np.unique(h2.space.totals):
        idx = h2.space.sector(int(total))
        out[int(total)] = scipy.linalg.eigvalsh(h2.matrix[np.ix_(idx, idx)])
    return out


def spectrum_compare(h1: MatrixLike, h2: FockOperator) -> SSpectrumReport:
    """
    Compares spectrum(H_1) with the sector-resolved spectrum of its second quantization.

    The one-excitation sector is the containment witness. The vacuum (energy 0) is the
    ground state of H_2 whenever H_1 is positive definite, so the ground states disagree.
    """
    h1 = require_hermitian(h1, 'H_1')
    spectrum = scipy.linalg.eigvalsh(h1.matrix)
    sectors = sector_spectra(h2)
    witness = sectors.get(1, np.array([]))
    containment = float(np.max(np.abs(np.sort(witness) - spectrum), initial=0.0)) \
        if witness.shape == spectrum.shape else float('inf')
    ground_sector, ground = min(((n, float(vals[0])) for n, vals in sectors.items()), key=lambda item: item[1])
    tol = settings.TOLERANCES.energy_match
    return SSpectrumReport(
        spectrum_h1=truncate_spectrum(spectrum),
        sectors=[SSector(total=n, energies=truncate_spectrum(vals)) for n, vals in sectors.items()],
        containment_residual=containment,
        h1_ground=float(spectrum[0]),
        h2_ground=ground,
        h2_ground_sector=ground_sector,
        vacuum_is_ground=bool(sectors[0][0] <= ground + tol),
        ground_state_mismatch=abs(ground - float(spectrum[0])) > tol,
    )
