"""
Worked hierarchy examples: harmonic oscillator, particle in a polynomial potential, qubit.
"""
import math
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.signal

from qhier_app.config import settings
from qhier_app.dependencies import stream
from qhier_app.exceptions import UnsupportedFormError
from qhier_app.fock.quantize import second_quantize_hamiltonian
from qhier_app.fock.schemas import SFockSpace
from qhier_app.fock.space import build_fock_space
from qhier_app.hamiltonization.ehrenfest import central_derivative, ehrenfest_reduce
from qhier_app.hamiltonization.integrators import integrate_symplectic
from qhier_app.hamiltonization.phase_space import ObservableField, PhaseSpacePoint
from qhier_app.hierarchy.chain import (
    HierarchyChain,
    build_chain,
    energy_match_state,
    one_excitation_faithfulness,
    truncate_spectrum,
)
from qhier_app.hierarchy.schemas import SHierarchyReport, SLevel
from qhier_app.hierarchy.spectra import spectrum_compare
from qhier_app.hilbert.core import PAULI, random_state
from qhier_app.models import LevelKind, Statistics
from qhier_app.schemas import SResidual, residual

MAX_POTENTIAL_DEGREE = 4


def _levels(chain: HierarchyChain) -> list[SLevel]:
    out = []
    for level in chain.levels:
        spectrum = None
        if level.kind is LevelKind.hilbert:
            spectrum = truncate_spectrum(scipy.linalg.eigvalsh(level.matrix))
        space = None if level.space is None else SFockSpace.of(level.space)
        out.append(SLevel(index=level.index, kind=level.kind.value, dim=level.dim,
                          provenance=level.provenance, spectrum=spectrum, space=space))
    return out


def _chain_residuals(chain: HierarchyChain, rng: np.random.Generator, n_states: int = 20) -> list[SResidual]:
    tol = settings.TOLERANCES
    out = [residual('hierarchy.alternation', 0.0 if chain.alternates() else 1.0, 0.0)]
    hilbert = chain.hilbert_levels()
    for previous, level in zip(hilbert, hilbert[1:]):
        out.append(residual(f'hierarchy.one_excitation.{level.name}',
                            one_excitation_faithfulness(previous, level), tol.one_excitation))
        deltas = [energy_match_state(chain, previous.index, random_state(rng, previous.dim)).delta
                  for _ in range(n_states)]
        deltas.append(energy_match_state(chain, previous.index, np.zeros(previous.dim)).delta)
        out.append(residual(f'hierarchy.energy_match.{previous.name}->{level.name}', max(deltas),
                            tol.energy_match))
    return out


def _comparisons(chain: HierarchyChain):
    hilbert = chain.hilbert_levels()
    return [spectrum_compare(previous.matrix, level.operator) for previous, level in zip(hilbert, hilbert[1:])]


def oscillator_demo(omega: float = 1.0, cutoff: int = 5, second_cutoff: int = 2,
                    rng: Optional[np.random.Generator] = None) -> SHierarchyReport:
    """
    H_0 = [omega] -> Sigma_0 -> H_1 = omega a^dagger a -> Sigma_1 -> H_2.

    On the chart a = x + ip the symplectic form is 2 dx ^ dp, so the classical equations
    read x_dot = dH_0/dp / 2 and p_dot = -dH_0/dx / 2 with H_0 = omega (x^2 + p^2).
    """
    rng = stream(settings.QHIER_SEED, 'hierarchy.oscillator') if rng is None else rng
    tol = settings.TOLERANCES
    chain = build_chain([[omega]], [cutoff, second_cutoff])
    sigma0 = chain.levels[1].system
    residuals = _chain_residuals(chain, rng)

    grid = np.linspace(-1.0, 1.0, 5)
    chart = max(abs(sigma0.energy(PhaseSpacePoint([x + 1j * p])) - omega * (x * x + p * p))
                for x in grid for p in grid)
    residuals.append(residual('hierarchy.oscillator.chart', chart, tol.energy_match))

    a0 = PhaseSpacePoint([0.6 + 0.3j])
    orbit = integrate_symplectic(sigma0, a0, dt=1e-2, steps=1000)
    residuals.append(residual('hierarchy.oscillator.orbit',
                              float(np.max(np.abs(orbit.norms - orbit.norms[0]))), 1e-9))

    h1 = chain.hilbert(1)
    exact = omega * np.arange(cutoff + 1)
    spectrum_error = float(np.max(np.abs(scipy.linalg.eigvalsh(h1.matrix) - exact)))
    residuals.append(residual('hierarchy.oscillator.spectrum', spectrum_error, tol.energy_match))

    residuals.append(residual('hierarchy.oscillator.ehrenfest', _ehrenfest_error(omega),
                              tol.finite_difference))
    return SHierarchyReport(example='oscillator', levels=_levels(chain), comparisons=_comparisons(chain),
                            residuals=residuals, notes=[f'omega = {omega!r}', f'cutoffs = {[cutoff, second_cutoff]}'])


def _ehrenfest_error(omega: float, size: int = 40, alpha: complex = 0.8 + 0.2j, step: float = 1e-3) -> float:
    space = build_fock_space(1, Statistics.boson, size)
    a = space.annihilators[0]
    x_op, p_op = (a + a.conj().T) / 2, (a - a.conj().T) / 2j
    h = second_quantize_hamiltonian([[omega]], space).matrix
    n = np.arange(size + 1)
    coherent = np.exp(-abs(alpha) ** 2 / 2) * alpha ** n / np.sqrt([math.factorial(k) for k in n])
    series = ehrenfest_reduce(h, coherent, [ObservableField(x_op), ObservableField(p_op)],
                              np.arange(401) * step)
    x, p = series.column(0), series.column(1)
    # x_dot = dH_0/dp / 2 = omega p, p_dot = -dH_0/dx / 2 = -omega x
    x_err = np.max(np.abs(central_derivative(x, step) - omega * p[1:-1]))
    p_err = np.max(np.abs(central_derivative(p, step) + omega * x[1:-1]))
    return float(max(x_err, p_err))


def _poly_power(base: np.ndarray, power: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for _ in range(power):
        out = scipy.signal.convolve2d(out, base)
    return out


def _padded_sum(parts: Sequence[np.ndarray]) -> np.ndarray:
    size = max(max(p.shape) for p in parts)
    total = np.zeros((size, size), dtype=complex)
    for part in parts:
        total[:part.shape[0], :part.shape[1]] += part
    return total


def normal_ordered_symbol(v_coeffs: Sequence[float]) -> np.ndarray:
    """
    Coefficients C[r, s] of p^2 + V(x) = sum C[r, s] a*^r a^s on the chart a = x + ip.

    Raises:
        UnsupportedFormError: If V has degree above 4.
    """
    coeffs = list(v_coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) - 1 > MAX_POTENTIAL_DEGREE:
        raise UnsupportedFormError(f'potential degree {len(coeffs) - 1} exceeds {MAX_POTENTIAL_DEGREE}')
    # rows: powers of a*, columns: powers of a
    x = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
    p = np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex)
    parts = [_poly_power(p, 2)] + [c * _poly_power(x, k) for k, c in enumerate(coeffs)]
    return _padded_sum(parts)


def normal_ordered_operator(symbol: np.ndarray, a: np.ndarray) -> np.ndarray:
    adag = a.conj().T
    out = np.zeros_like(a)
    for r in range(symbol.shape[0]):
        for s in range(symbol.shape[1]):
            if symbol[r, s] != 0:
                out += symbol[r, s] * np.linalg.matrix_power(adag, r) @ np.linalg.matrix_power(a, s)
    return out


def weyl_vacuum_offset(v_coeffs: Sequence[float], symbol: np.ndarray, size: int) -> float:
    """<0| p^2 + V(x) |0> with x, p as operators (Weyl ordering) minus the normal-ordered value."""
    a = build_fock_space(1, Statistics.boson, size).annihilators[0]
    x, p = (a + a.conj().T) / 2, (a - a.conj().T) / 2j
    weyl = p @ p + sum(c * np.linalg.matrix_power(x, k) for k, c in enumerate(v_coeffs))
    return float((weyl[0, 0] - symbol[0, 0]).real)


def potential_demo(v_coeffs: Sequence[float], size: int = 8, cutoff: int = 2, chart_size: int = 40,
                   rng: Optional[np.random.Generator] = None) -> SHierarchyReport:
    """
    Particle in V(x) = sum_k v_coeffs[k] x^k, degree <= 4.

    H_0 is the normal-ordered operator of p^2 + V(x) on a single-mode space of
    dimension ``size + 1``; it is then hamiltonized and quantized once. The chart check
    compares coherent-state expectations on a ``chart_size`` truncation with p^2 + V(x).
    """
    rng = stream(settings.QHIER_SEED, 'hierarchy.potential') if rng is None else rng
    symbol = normal_ordered_symbol(v_coeffs)
    a = build_fock_space(1, Statistics.boson, size).annihilators[0]
    h0 = normal_ordered_operator(symbol, a)
    chain = build_chain(h0, [cutoff])
    residuals = _chain_residuals(chain, rng)

    big_a = build_fock_space(1, Statistics.boson, chart_size).annihilators[0]
    big_h = normal_ordered_operator(symbol, big_a)
    n = np.arange(chart_size + 1)
    norms = np.sqrt([math.factorial(k) for k in n])
    errors = []
    for x in np.linspace(-1.0, 1.0, 5):
        for p in np.linspace(-1.0, 1.0, 4):
            alpha = x + 1j * p
            coherent = np.exp(-abs(alpha) ** 2 / 2) * alpha ** n / norms
            classical = p * p + sum(c * x ** k for k, c in enumerate(v_coeffs))
            errors.append(abs(np.vdot(coherent, big_h @ coherent).real - classical))
    residuals.append(residual('hierarchy.potential.chart', max(errors), 1e-8))

    offset = weyl_vacuum_offset(v_coeffs, symbol, chart_size)
    notes = [
        f'V coefficients = {list(v_coeffs)!r}',
        'H_0 is normal ordered',
        f'Weyl ordering would shift the vacuum energy by {offset!r}',
    ]
    return SHierarchyReport(example='potential', levels=_levels(chain), comparisons=_comparisons(chain),
                            residuals=residuals, notes=notes)


def qubit_demo(h0: Optional[np.ndarray] = None, cutoff: int = 2, statistics: Statistics = Statistics.boson,
               rng: Optional[np.random.Generator] = None) -> SHierarchyReport:
    """Two-level chain H_0 -> Sigma_0 -> H_1 -> Sigma_1 -> H_2 (sigma_z by default)."""
    rng = stream(settings.QHIER_SEED, 'hierarchy.qubit') if rng is None else rng
    h0 = PAULI['Z'] if h0 is None else h0
    statistics = Statistics(statistics)
    chain = build_chain(h0, [cutoff, None], statistics)
    return SHierarchyReport(example='qubit', levels=_levels(chain), comparisons=_comparisons(chain),
                            residuals=_chain_residuals(chain, rng),
                            notes=[f'statistics = {statistics.value}', f'first cutoff = {cutoff}'])
