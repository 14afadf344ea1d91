"""
Verification batteries, one per domain. Every check yields named residual records;
all randomness comes from named sub-streams of one seed.
"""
import logging
import math
from typing import Callable, Optional

import numpy as np

from qhier_app.config import settings
from qhier_app.dependencies import stream
from qhier_app.eclectic.local import extract_local_state, local_energy, partial_amplitudes
from qhier_app.eclectic.many_body import (
    product_fock_state,
    second_quantized_many_body,
    separable_form,
    separable_gap_report,
)
from qhier_app.eclectic.system import build_eclectic, dimension_report, eclectic_state, verify_energy_identity
from qhier_app.fock.quantize import (
    bracket_identity_residual,
    equal_time_residual,
    field_hamilton_residual,
    heisenberg_field_residual,
    observable_heisenberg_residual,
    one_excitation_block,
    quantum_jacobi_residual,
    second_quantize_hamiltonian,
    second_quantize_observable,
)
from qhier_app.fock.space import build_fock_space
from qhier_app.fock.states import second_quantize_state, von_neumann_residual
from qhier_app.fock.statistics import check_statistics
from qhier_app.hamiltonians.builders import chain_edges, heisenberg_model, random_model
from qhier_app.hamiltonians.model import KLocalHamiltonian, assemble_full, energy, term_energy
from qhier_app.hamiltonization.integrators import convergence_ratio, integrate_symplectic
from qhier_app.hamiltonization.phase_space import (
    ObservableField,
    PhaseSpacePoint,
    hamiltonize,
    jacobi_residual_classical,
    poisson_bracket_classical,
    poisson_dynamics_residual,
)
from qhier_app.hierarchy.chain import mixed_energy_match
from qhier_app.hierarchy.demos import oscillator_demo, potential_demo, qubit_demo
from qhier_app.hilbert.core import max_abs, propagator, random_density, random_hermitian, random_state
from qhier_app.models import IntegrationMethod, Layout, Picture, Statistics, Suite
from qhier_app.open_dynamics.kraus import KrausMap, duality_residual, kraus_apply
from qhier_app.open_dynamics.lift import second_quantized_lindblad_observable, second_quantized_lindblad_state
from qhier_app.open_dynamics.lindblad import (
    LindbladModel,
    amplitude_damping,
    density_diagnostics,
    lindblad_evolve,
    lindblad_step_halving,
    lindblad_trajectory,
)
from qhier_app.open_dynamics.sse import compare_with_master_equation, sse_ensemble
from qhier_app.schemas import SResidual, residual

logger = logging.getLogger(__name__)

MODEL_CHECK_MAX_DIM = 64
SSE_TRAJECTORIES = 10_000


def _phase(seed: int, model: Optional[KLocalHamiltonian]) -> list[SResidual]:
    tol = settings.TOLERANCES
    rng = stream(seed, 'verify.phase')
    bracket, jacobi, dynamics = 0.0, 0.0, 0.0
    for _ in range(100):
        d = int(rng.integers(2, 7))
        f, g, e = (ObservableField(random_hermitian(rng, d)) for _ in range(3))
        p = PhaseSpacePoint(random_state(rng, d))
        value, expected = poisson_bracket_classical(f, g, p)
        bracket = max(bracket, abs(value - expected))
        jacobi = max(jacobi, jacobi_residual_classical(f, g, e, p))
        dynamics = max(dynamics, poisson_dynamics_residual(hamiltonize(f.matrix), p))
    out = [
        residual('phase.bracket', bracket, tol.bracket),
        residual('phase.jacobi', jacobi, tol.jacobi),
        residual('phase.dynamics', dynamics, tol.field),
    ]

    energy_drift, norm_drift = 0.0, 0.0
    for _ in range(3):
        d = int(rng.integers(2, 9))
        sys = hamiltonize(random_hermitian(rng, d))
        run = integrate_symplectic(sys, PhaseSpacePoint(random_state(rng, d)), 1e-3, 10_000)
        energy_drift = max(energy_drift, run.energy_drift)
        norm_drift = max(norm_drift, run.norm_drift)
    out.append(residual('phase.midpoint.energy_drift', energy_drift, tol.drift))
    out.append(residual('phase.midpoint.norm_drift', norm_drift, tol.drift))

    sys = hamiltonize(random_hermitian(rng, 4))
    p0 = PhaseSpacePoint(random_state(rng, 4))
    for method in IntegrationMethod:
        ratio = convergence_ratio(sys, p0, 1e-2, 1.0, method)
        out.append(residual(f'phase.{method.value}.order', abs(ratio - 4.0), 0.5))

    if model is not None and model.full_dim <= MODEL_CHECK_MAX_DIM:
        sys = hamiltonize(assemble_full(model).matrix)
        run = integrate_symplectic(sys, PhaseSpacePoint(random_state(rng, sys.dim)), 1e-3, 1000)
        out.append(residual('phase.model.energy_drift', run.energy_drift, tol.drift))
    return out


BOSON_SPACES = tuple((d, n) for d in range(1, 5) for n in range(1, 6))
FERMION_MODES = (1, 2, 3, 4, 5, 6)


def _fock(seed: int, model: Optional[KLocalHamiltonian]) -> list[SResidual]:
    tol = settings.TOLERANCES
    rng = stream(seed, 'verify.fock')
    out = []
    spaces = [build_fock_space(d, Statistics.boson, n) for d, n in BOSON_SPACES]
    spaces += [build_fock_space(d, Statistics.fermion) for d in FERMION_MODES]
    for space in spaces:
        out.extend(check_statistics(space))

    for space in (build_fock_space(3, Statistics.boson, 3), build_fock_space(4, Statistics.fermion)):
        field, hamilton_psi, hamilton_zeta, block = 0.0, 0.0, 0.0, 0.0
        brackets, equal_time, jacobi = 0.0, 0.0, 0.0
        for _ in range(100):
            h = random_hermitian(rng, space.modes)
            field = max(field, heisenberg_field_residual(space, h))
            psi_res, zeta_res = field_hamilton_residual(space, h)
            hamilton_psi, hamilton_zeta = max(hamilton_psi, psi_res), max(hamilton_zeta, zeta_res)
            hh = second_quantize_hamiltonian(h, space)
            block = max(block, max_abs(one_excitation_block(hh).matrix - h))
            g = second_quantize_observable(random_hermitian(rng, space.modes), space)
            e = second_quantize_observable(random_hermitian(rng, space.modes), space)
            brackets = max(brackets, bracket_identity_residual(hh, g))
            equal_time = max(equal_time, equal_time_residual(hh, g))
            jacobi = max(jacobi, quantum_jacobi_residual(hh, g, e))
        sector = space.safe_label()
        out += [
            residual('fock.field', field, tol.field, space, sector),
            residual('fock.hamilton.psi', hamilton_psi, tol.field, space, sector),
            residual('fock.hamilton.zeta', hamilton_zeta, tol.field, space, sector),
            residual('fock.one_excitation', block, tol.one_excitation, space, 'N=1'),
            residual('fock.bracket', brackets, tol.bracket, space, space.safe_label(0)),
            residual('fock.equal_time', equal_time, tol.bracket, space, space.safe_label(0)),
            residual('fock.jacobi', jacobi, tol.jacobi, space, space.safe_label(0)),
        ]

    dynamics, bracket, heisenberg, energy_match = 0.0, 0.0, 0.0, 0.0
    for _ in range(10):
        d = int(rng.integers(2, 4))
        space = build_fock_space(d, Statistics.boson, 2)
        h = random_hermitian(rng, d, 0.5)
        state = second_quantize_state(random_density(rng, d, rank=2), space)
        res = von_neumann_residual(state, h)
        dynamics, bracket = max(dynamics, res.dynamics), max(bracket, res.bracket)
        heisenberg = max(heisenberg, observable_heisenberg_residual(random_hermitian(rng, d), h, space, 0.3))
        _, e_in, e_out = mixed_energy_match(random_density(rng, d), h, space)
        energy_match = max(energy_match, abs(e_in - e_out))
    out += [
        residual('fock.von_neumann.dynamics', dynamics, tol.bracket),
        residual('fock.von_neumann.bracket', bracket, tol.bracket),
        residual('fock.observable_heisenberg', heisenberg, tol.finite_difference),
        residual('fock.mixed_energy_match', energy_match, tol.energy_match),
    ]

    if model is not None and model.full_dim <= 8:
        space = build_fock_space(model.full_dim, Statistics.fermion)
        out.append(residual('fock.model.field', heisenberg_field_residual(space, assemble_full(model)), tol.field,
                            space))
    return out


def _hierarchy(seed: int, model: Optional[KLocalHamiltonian]) -> list[SResidual]:
    reports = {
        'oscillator': oscillator_demo(rng=stream(seed, 'verify.hierarchy.oscillator')),
        'harmonic': potential_demo([0.0, 0.0, 1.0], rng=stream(seed, 'verify.hierarchy.harmonic')),
        'quartic': potential_demo([0.0, 0.0, 1.0, 0.0, 0.5], rng=stream(seed, 'verify.hierarchy.quartic')),
        'qubit-boson': qubit_demo(rng=stream(seed, 'verify.hierarchy.qubit.boson')),
        'qubit-fermion': qubit_demo(statistics=Statistics.fermion,
                                    rng=stream(seed, 'verify.hierarchy.qubit.fermion')),
    }
    out = []
    for label, report in reports.items():
        for item in report.residuals:
            out.append(item.model_copy(update={'check': f'{item.check}@{label}'}))
    return out


def _random_eclectic_case(rng: np.random.Generator) -> KLocalHamiltonian:
    d = int(rng.choice([2, 3]))
    n = int(rng.integers(2, 9 if d == 2 else 7))
    k = int(rng.integers(1, min(3, n) + 1))
    return random_model(rng, n, d, k)


def _eclectic(seed: int, model: Optional[KLocalHamiltonian]) -> list[SResidual]:
    tol = settings.TOLERANCES
    rng = stream(seed, 'verify.eclectic')
    out = []
    deltas = {layout: 0.0 for layout in Layout}
    per_term, extraction, norms = 0.0, 0.0, 0.0
    for _ in range(100):
        h = _random_eclectic_case(rng)
        psi = random_state(rng, h.full_dim)
        for term in h.terms:
            per_term = max(per_term, abs(local_energy(psi, term, h) - term_energy(h, term, psi)))
            norms = max(norms, abs(partial_amplitudes(psi, term, h).norm_identity() - 1.0))
            extraction = max(extraction, extract_local_state(psi, term, h).delta)
        for layout in Layout:
            system = build_eclectic(h, layout)
            deltas[layout] = max(deltas[layout], verify_energy_identity(psi, system, h).delta)
    out += [
        residual('eclectic.local_energy', per_term, tol.energy_match),
        residual('eclectic.partial_amplitudes.norm', norms, tol.normalized),
        residual('eclectic.extraction', extraction, tol.local_energy),
    ]
    out += [residual(f'eclectic.energy.{layout.value}', value, tol.eclectic_energy) for layout, value in deltas.items()]

    padding = 0.0
    for _ in range(10):
        h = random_model(rng, int(rng.integers(2, 5)), 2, 2)
        system = build_eclectic(h, Layout.padded_tensor)
        for locality in sorted({b.locality for b in system.blocks}):
            dense = system.class_operator(locality)
            covered = np.zeros(dense.shape, dtype=bool)
            for block in system.class_blocks(locality):
                rows = system.block_indices(block)
                padding = max(padding, float(np.any(dense[np.ix_(rows, rows)] != block.matrix)))
                covered[np.ix_(rows, rows)] = True
            padding = max(padding, float(np.any(dense[~covered] != 0)))
    out.append(residual('eclectic.padding', padding, 0.0))

    one_excitation, composite = 0.0, 0.0
    for n in (2, 3, 4):
        h = heisenberg_model(n, 2, chain_edges(n), h=0.3)
        field = second_quantized_many_body(h)
        one_excitation = max(one_excitation, field.one_excitation_residual())
        psi = random_state(rng, h.full_dim)
        composite = max(composite, abs(field.energy(field.composite_state(psi)) - energy(h, psi)))
    out += [
        residual('eclectic.many_body.one_excitation', one_excitation, tol.one_excitation),
        residual('eclectic.many_body.energy', composite, tol.local_energy),
    ]

    separable = 0.0
    for n in (2, 3):
        h = heisenberg_model(n, 2, chain_edges(n), h=0.3)
        hsep = separable_form(h)
        for _ in range(5):
            factors = [random_state(rng, 2) for _ in range(n)]
            psi = factors[0]
            for phi in factors[1:]:
                psi = np.kron(psi, phi)
            chi = product_fock_state(factors, hsep.space, h.d)
            separable = max(separable, abs(float(np.vdot(chi, hsep.matrix @ chi).real) - energy(h, psi)))
            separable = max(separable, separable_gap_report(h, psi, hsep).gap)
    out.append(residual('eclectic.separable.product', separable, tol.local_energy))

    mismatches = 0
    for row in dimension_report(sweep=range(2, 15), warn=False):
        m = 2 * row.n - 1
        mismatches += (row.full, row.padded, row.direct_sum) != (2 ** row.n, (2 * row.n) ** 2, 4 * m)
    out.append(residual('eclectic.dimensions', float(mismatches), 0.0))

    if model is not None and model.full_dim <= settings.QHIER_CAP:
        for layout in Layout:
            system = build_eclectic(model, layout)
            worst = max(verify_energy_identity(random_state(rng, model.full_dim), system).delta for _ in range(20))
            out.append(residual(f'eclectic.model.energy.{layout.value}', worst, tol.eclectic_energy))
    return out


def _random_lindblad(rng: np.random.Generator, d: int) -> LindbladModel:
    ops = []
    for _ in range(int(rng.integers(1, 3))):
        jump = 0.5 * (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
        ops.append((jump, float(rng.uniform(0.0, 0.5))))
    return LindbladModel(random_hermitian(rng, d, 0.5), tuple(ops))


def _random_kraus(rng: np.random.Generator, d: int, rank: int) -> KrausMap:
    a = rng.normal(size=(rank * d, d)) + 1j * rng.normal(size=(rank * d, d))
    q, _ = np.linalg.qr(a)
    return KrausMap(tuple(q[i * d:(i + 1) * d] for i in range(rank)))


def _open(seed: int, model: Optional[KLocalHamiltonian]) -> list[SResidual]:
    tol = settings.TOLERANCES
    rng = stream(seed, 'verify.open')
    out = []
    damping = amplitude_damping(1.0)
    excited = np.diag([0.0, 1.0]).astype(complex)
    states = lindblad_trajectory(damping, excited, [0.5, 1.0, 2.0])
    closed = max(abs(rho[1, 1].real - math.exp(-t)) for t, rho in zip((0.5, 1.0, 2.0), states))
    out.append(residual('open.damping.closed_form', closed, tol.finite_difference))
    ground = np.diag([1.0, 0.0]).astype(complex)
    settled = max_abs(lindblad_evolve(damping, excited, 20.0).matrix - ground)
    out.append(residual('open.damping.fixed_point', settled, tol.finite_difference))

    unitary, trace_error, negativity, lift_obs = 0.0, 0.0, 0.0, 0.0
    lift_vacuum, lift_dynamics = 0.0, 0.0
    for index in range(50):
        d = int(rng.integers(2, 4))
        m = _random_lindblad(rng, d)
        rho0 = random_density(rng, d)
        if index < 10:
            closed_model = LindbladModel(m.h)
            u = propagator(m.h, 1.0).matrix
            evolved = lindblad_evolve(closed_model, rho0, 1.0).matrix
            unitary = max(unitary, max_abs(evolved - u @ rho0 @ u.conj().T))
            for rho in lindblad_trajectory(m, rho0, [0.5, 1.0, 2.0]):
                err, lowest = density_diagnostics(rho)
                trace_error, negativity = max(trace_error, err), max(negativity, -lowest)
        statistics = Statistics.boson if index % 2 == 0 else Statistics.fermion
        space = build_fock_space(d, statistics, 3 if statistics is Statistics.boson else None)
        lift_obs = max(lift_obs, second_quantized_lindblad_observable(m, random_hermitian(rng, d), space))
        state_space = build_fock_space(d, Statistics.boson, 2)
        state = second_quantize_state(random_density(rng, d, rank=2), state_space)
        res = second_quantized_lindblad_state(m, state)
        lift_vacuum, lift_dynamics = max(lift_vacuum, res.vacuum), max(lift_dynamics, res.dynamics)
    out += [
        residual('open.unitary_limit', unitary, 1e-9),
        residual('open.trace', trace_error, tol.drift),
        residual('open.positivity', max(negativity, 0.0), tol.drift),
        residual('open.lift.observable', lift_obs, tol.lindblad_lift),
        residual('open.lift.state.vacuum', lift_vacuum, tol.lindblad_lift),
        residual('open.lift.state.dynamics', lift_dynamics, tol.lindblad_lift),
    ]

    ratio = lindblad_step_halving(damping, excited, 1.0, 0.1)
    out.append(residual('open.rk4.order', abs(ratio - 16.0), 2.0))

    duality, completeness, kraus_vacuum, kraus_field = 0.0, 0.0, 0.0, 0.0
    for _ in range(50):
        d = int(rng.integers(2, 4))
        kraus = _random_kraus(rng, d, int(rng.integers(1, 4)))
        rho, o = random_density(rng, d), random_hermitian(rng, d)
        duality = max(duality, duality_residual(kraus, rho, o))
        completeness = max(completeness, kraus.completeness_error())
        space = build_fock_space(d, Statistics.boson, 2)
        state = second_quantize_state(rho, space)
        mapped = kraus_apply(kraus, state).reshape(d, space.dim, d, space.dim)[:, 0, :, 0]
        kraus_vacuum = max(kraus_vacuum, max_abs(mapped - kraus_apply(kraus, rho).matrix))
        v = random_state(rng, d)
        chi = np.zeros(space.dim, dtype=complex)
        chi[space.sector(1)] = v
        lifted = kraus_apply(kraus, second_quantize_observable(o, space), Picture.heisenberg)
        expected = np.trace(kraus_apply(kraus, np.outer(v, v.conj())).matrix @ o)
        kraus_field = max(kraus_field, abs(np.vdot(chi, lifted.matrix @ chi) - expected))
    out += [
        residual('open.kraus.duality', duality, tol.field),
        residual('open.kraus.trace_preserving', completeness, tol.hermitian),
        residual('open.kraus.lift.state', kraus_vacuum, tol.field),
        residual('open.kraus.lift.observable', kraus_field, tol.field),
    ]

    sse_model = amplitude_damping(1.0, 0.5 * np.diag([1.0, -1.0]))
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)
    ensemble = sse_ensemble(sse_model, plus, 1.0, 1e-2, SSE_TRAJECTORIES, seed)
    comparison = compare_with_master_equation(ensemble)
    out.append(residual('open.sse.l1', max(c.l1_error for c in comparison), comparison[0].bound))
    worst = 0.0
    for t, mean in zip(ensemble.times, ensemble.mean_states):
        p = 0.5 * math.exp(-t)
        sigma = math.sqrt(p * (1 - p) / ensemble.n_traj)
        worst = max(worst, abs(mean[1, 1].real - p) / (3 * sigma))
    out.append(residual('open.sse.binomial', worst, 1.0))
    out.append(residual('open.sse.norm', ensemble.norm_error, tol.drift))
    return out


SUITES: dict[Suite, Callable[[int, Optional[KLocalHamiltonian]], list[SResidual]]] = {
    Suite.phase: _phase,
    Suite.fock: _fock,
    Suite.hierarchy: _hierarchy,
    Suite.eclectic: _eclectic,
    Suite.open: _open,
}


def run_suite(suite: Suite, seed: int, model: Optional[KLocalHamiltonian] = None) -> list[SResidual]:
    """Runs one battery, or all of them in a fixed order for ``Suite.all``."""
    suite = Suite(suite)
    chosen = list(SUITES) if suite is Suite.all else [suite]
    out = []
    for name in chosen:
        logger.info('running suite %s (seed %d)', name.value, seed)
        out.extend(SUITES[name](seed, model))
    return out
