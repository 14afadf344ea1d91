import logging

import numpy as np

from qhier_app.config import settings
from qhier_app.fock.space import FockSpace
from qhier_app.hilbert.core import anticommutator, commutator, max_abs
from qhier_app.schemas import SResidual, residual

logger = logging.getLogger(__name__)


def _relation_residuals(space: FockSpace) -> dict[str, np.ndarray]:
    """Per relation, the stacked deviation matrices over all mode pairs."""
    a, adag = space.annihilators, space.creators
    bracket = commutator if space.is_boson else anticommutator
    eye = np.eye(space.dim)
    mixed, lower, upper = [], [], []
    for i in range(space.modes):
        for j in range(space.modes):
            mixed.append(bracket(a[i], adag[j]) - (eye if i == j else 0))
            lower.append(bracket(a[i], a[j]))
            upper.append(bracket(adag[i], adag[j]))
    return {'mixed': np.array(mixed), 'lower': np.array(lower), 'upper': np.array(upper)}


def check_statistics(space: FockSpace) -> list[SResidual]:
    """
    Max-norm residuals of the (anti)commutation relations.

    Fermion relations are checked on the whole space. Boson relations are checked on
    N <= N_tot - 1, and the unrestricted [a_i, a_i^dagger] = 1 violation is reported
    with the ``truncation-artifact`` flag.
    """
    tol = settings.TOLERANCES.statistics
    name = 'ccr' if space.is_boson else 'car'
    stacks = _relation_residuals(space)
    out = []
    for relation, stack in stacks.items():
        value = max(space.restricted(x) for x in stack) if len(stack) else 0.0
        out.append(residual(f'fock.statistics.{name}.{relation}', value, tol, space, space.safe_label()))
    if space.is_boson:
        boundary = max_abs(stacks['mixed'])
        logger.warning('unrestricted CCR residual %.3e on %s (truncation artifact)', boundary, space.describe())
        out.append(residual(f'fock.statistics.{name}.boundary', boundary, tol, space, 'full',
                            flag='truncation-artifact'))
    return out
