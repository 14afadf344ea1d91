import math

import numpy as np
import pytest

from qhier_app.config import settings
from qhier_app.exceptions import ArgumentError, StepSizeError, UnsupportedFormError, ValidationFailed
from qhier_app.fock.quantize import second_quantize_observable
from qhier_app.fock.space import FockOperator, build_fock_space
from qhier_app.fock.states import second_quantize_state
from qhier_app.hilbert.core import max_abs, propagator, random_density, random_hermitian, random_state
from qhier_app.models import Picture, Statistics
from qhier_app.open_dynamics import sse
from qhier_app.open_dynamics.kraus import KrausMap, amplitude_damping_kraus, duality_residual, kraus_apply
from qhier_app.open_dynamics.lift import second_quantized_lindblad_observable, second_quantized_lindblad_state
from qhier_app.open_dynamics.lindblad import (
    SIGMA_MINUS,
    LindbladModel,
    amplitude_damping,
    density_diagnostics,
    lindblad_evolve,
    lindblad_step_halving,
    lindblad_trajectory,
)
from qhier_app.open_dynamics.schemas import SEnsembleReport
from qhier_app.open_dynamics.sse import compare_with_master_equation, sse_ensemble, sse_trajectory_matrix

EXCITED = np.diag([0.0, 1.0]).astype(complex)


def random_lindblad(rng, d, scale=0.5):
    jump = scale * (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return LindbladModel(random_hermitian(rng, d, scale), ((jump, 0.3),))


def random_kraus(rng, d, rank):
    a = rng.normal(size=(rank * d, d)) + 1j * rng.normal(size=(rank * d, d))
    q, _ = np.linalg.qr(a)
    return KrausMap(tuple(q[i * d:(i + 1) * d] for i in range(rank)))


def test_model_validation():
    with pytest.raises(ValidationFailed):
        LindbladModel(np.eye(2), ((SIGMA_MINUS, -0.1),))
    with pytest.raises(ArgumentError):
        LindbladModel(np.eye(2), ((np.eye(3), 1.0),))
    with pytest.raises(ValidationFailed):
        LindbladModel(np.array([[0, 1], [0, 0]]))


def test_superoperator_matches_derivative(rng):
    m = random_lindblad(rng, 3)
    rho = random_density(rng, 3)
    assert np.allclose(m.superoperator() @ rho.reshape(-1), m.derivative(rho).reshape(-1), atol=1e-12)


def test_amplitude_damping_closed_form():
    states = lindblad_trajectory(amplitude_damping(1.0), EXCITED, [0.5, 1.0, 2.0])
    for t, rho in zip((0.5, 1.0, 2.0), states):
        assert abs(rho[1, 1].real - math.exp(-t)) < 1e-8
        assert abs(np.trace(rho).real - 1.0) < 1e-12


def test_amplitude_damping_settles_in_ground_state():
    rho = lindblad_evolve(amplitude_damping(1.0), EXCITED, 20.0).matrix
    assert max_abs(rho - np.diag([1.0, 0.0])) < settings.TOLERANCES.finite_difference


def test_trajectory_includes_time_zero(rng):
    rho0 = random_density(rng, 2)
    states = lindblad_trajectory(amplitude_damping(0.5), rho0, [0.0, 1.0])
    assert np.allclose(states[0], rho0)


def test_trajectory_rejects_bad_input(rng):
    with pytest.raises(ArgumentError):
        lindblad_trajectory(amplitude_damping(), EXCITED, [1.0, 0.5])
    with pytest.raises(ValidationFailed):
        lindblad_trajectory(amplitude_damping(), 2 * EXCITED, [1.0])
    with pytest.raises(ArgumentError):
        lindblad_trajectory(amplitude_damping(), random_density(rng, 3), [1.0])


def test_unitary_limit(rng):
    h = random_hermitian(rng, 3, 0.5)
    rho0 = random_density(rng, 3)
    u = propagator(h, 1.0).matrix
    evolved = lindblad_evolve(LindbladModel(h), rho0, 1.0).matrix
    assert max_abs(evolved - u @ rho0 @ u.conj().T) < 1e-9


def test_trace_and_positivity_preserved(rng):
    for _ in range(5):
        m = random_lindblad(rng, 3)
        for rho in lindblad_trajectory(m, random_density(rng, 3), [0.5, 1.0, 2.0]):
            trace_error, lowest = density_diagnostics(rho)
            assert trace_error < settings.TOLERANCES.drift
            assert lowest > -settings.TOLERANCES.drift


def test_rk4_step_halving_ratio():
    ratio = lindblad_step_halving(amplitude_damping(1.0), EXCITED, 1.0, 0.1)
    assert 14.0 <= ratio <= 18.0


@pytest.mark.parametrize('statistics,cutoff', [(Statistics.boson, 3), (Statistics.fermion, None)])
def test_lifted_observable_equation(rng, statistics, cutoff):
    m = random_lindblad(rng, 2)
    space = build_fock_space(2, statistics, cutoff)
    error = second_quantized_lindblad_observable(m, random_hermitian(rng, 2), space)
    assert error < settings.TOLERANCES.lindblad_lift


def test_lifted_observable_dimension_mismatch(rng):
    space = build_fock_space(3, Statistics.fermion)
    with pytest.raises(ArgumentError):
        second_quantized_lindblad_observable(random_lindblad(rng, 2), np.eye(2), space)


def test_lifted_state_equation(rng):
    m = LindbladModel(random_hermitian(rng, 2, 0.5), ((SIGMA_MINUS, 0.3),))
    space = build_fock_space(2, Statistics.boson, 2)
    state = second_quantize_state(random_density(rng, 2), space)
    res = second_quantized_lindblad_state(m, state)
    assert res.vacuum < settings.TOLERANCES.lindblad_lift
    assert res.dynamics < settings.TOLERANCES.lindblad_lift


def test_kraus_construction():
    with pytest.raises(ArgumentError):
        KrausMap(())
    with pytest.raises(ArgumentError):
        KrausMap((np.eye(2), np.eye(3)))
    damping = amplitude_damping_kraus(0.3)
    assert damping.trace_preserving
    assert not damping.subnormalized
    assert KrausMap((0.5 * np.eye(2),)).subnormalized


def test_kraus_on_density_matrix():
    out = kraus_apply(amplitude_damping_kraus(0.3), EXCITED).matrix
    assert np.allclose(out, np.diag([0.3, 0.7]))


def test_kraus_duality(rng):
    for rank in (1, 2, 3):
        kraus = random_kraus(rng, 3, rank)
        assert kraus.completeness_error() < settings.TOLERANCES.hermitian
        assert duality_residual(kraus, random_density(rng, 3), random_hermitian(rng, 3)) < settings.TOLERANCES.field


def test_kraus_heisenberg_is_adjoint_schrodinger(rng):
    kraus = random_kraus(rng, 2, 2)
    o = random_hermitian(rng, 2)
    heisenberg = kraus_apply(kraus, o, Picture.heisenberg).matrix
    assert np.allclose(heisenberg, kraus_apply(kraus.adjoint(), o).matrix)


def test_kraus_on_lifted_state(rng):
    kraus = random_kraus(rng, 2, 2)
    rho = random_density(rng, 2)
    space = build_fock_space(2, Statistics.boson, 2)
    mapped = kraus_apply(kraus, second_quantize_state(rho, space))
    vacuum_block = mapped.reshape(2, space.dim, 2, space.dim)[:, 0, :, 0]
    assert max_abs(vacuum_block - kraus_apply(kraus, rho).matrix) < settings.TOLERANCES.field


def test_kraus_on_quadratic_form(rng):
    kraus = random_kraus(rng, 3, 2)
    o = random_hermitian(rng, 3)
    space = build_fock_space(3, Statistics.boson, 2)
    lifted = kraus_apply(kraus, second_quantize_observable(o, space), Picture.heisenberg)
    assert isinstance(lifted, FockOperator)
    assert np.allclose(lifted.kernel, kraus_apply(kraus, o, Picture.heisenberg).matrix)
    v = random_state(rng, 3)
    chi = np.zeros(space.dim, dtype=complex)
    chi[space.sector(1)] = v
    expected = np.trace(kraus_apply(kraus, np.outer(v, v.conj())).matrix @ o)
    assert abs(np.vdot(chi, lifted.matrix @ chi) - expected) < settings.TOLERANCES.field


def test_kraus_rejects_non_quadratic():
    space = build_fock_space(2, Statistics.fermion)
    raw = FockOperator(space, space.number_operator @ space.number_operator)
    with pytest.raises(UnsupportedFormError):
        kraus_apply(amplitude_damping_kraus(0.5), raw)


def test_kraus_dimension_mismatch(rng):
    with pytest.raises(ArgumentError):
        kraus_apply(amplitude_damping_kraus(0.5), random_density(rng, 3))


def test_sse_ensemble_is_reproducible():
    first = sse_ensemble(amplitude_damping(1.0), [0, 1], 1.0, 1e-2, 64, seed=7)
    second = sse_ensemble(amplitude_damping(1.0), [0, 1], 1.0, 1e-2, 64, seed=7)
    assert np.array_equal(first.mean_states, second.mean_states)
    assert np.array_equal(first.jumps, second.jumps)


def test_sse_ensemble_ignores_chunking(monkeypatch):
    whole = sse_ensemble(amplitude_damping(1.0), [0, 1], 0.5, 1e-2, 100, seed=3)
    monkeypatch.setattr(sse, 'CHUNK', 16)
    chunked = sse_ensemble(amplitude_damping(1.0), [0, 1], 0.5, 1e-2, 100, seed=3)
    assert np.allclose(whole.mean_states, chunked.mean_states, atol=1e-12)
    assert np.array_equal(whole.jumps, chunked.jumps)


def test_sse_matches_master_equation():
    ensemble = sse_ensemble(amplitude_damping(1.0), [0, 1], 1.0, 1e-2, 400, seed=7)
    assert ensemble.jumps.max() <= 1
    assert ensemble.norm_error < settings.TOLERANCES.drift
    assert np.allclose(ensemble.times, [0.2, 0.4, 0.6, 0.8, 1.0])
    comparison = compare_with_master_equation(ensemble)
    assert comparison[0].bound == pytest.approx(0.25)
    assert all(c.passed for c in comparison)


def test_sse_at_time_zero():
    ensemble = sse_ensemble(amplitude_damping(1.0), [0, 1], 0.0, 1e-2, 10, seed=7)
    assert ensemble.times.tolist() == [0.0]
    assert np.allclose(sse_trajectory_matrix(ensemble)[0], EXCITED)


def test_sse_short_horizon_takes_one_step():
    ensemble = sse_ensemble(amplitude_damping(0.01), [0, 1], 0.4, 1.0, 10, seed=7)
    assert ensemble.dt == pytest.approx(0.4)
    assert ensemble.times[-1] == pytest.approx(0.4)


def test_sse_rejects_large_steps():
    with pytest.raises(StepSizeError):
        sse_ensemble(amplitude_damping(1.0), [0, 1], 1.0, 0.5, 10, seed=7)


def test_sse_argument_errors():
    with pytest.raises(ArgumentError):
        sse_ensemble(amplitude_damping(1.0), [0, 1], 1.0, 1e-2, 0, seed=7)
    with pytest.raises(ArgumentError):
        sse_ensemble(amplitude_damping(1.0), [0, 1], 1.0, 0.0, 10, seed=7)
    with pytest.raises(ArgumentError):
        sse_ensemble(amplitude_damping(1.0), [0, 1, 0], 1.0, 1e-2, 10, seed=7)


def test_ensemble_report():
    ensemble = sse_ensemble(amplitude_damping(1.0), [0, 1], 0.5, 1e-2, 50, seed=11)
    report = SEnsembleReport.of(ensemble)
    data = report.model_dump(by_alias=True)
    assert data['schema'] == settings.SCHEMA
    assert data['n_traj'] == 50
    assert data['seed'] == 11
    assert data['jumps_total'] == int(ensemble.jumps.sum())
    assert len(data['comparison']) == len(ensemble.times)
    assert set(data['comparison'][0]) == {'t', 'l1_error', 'bound', 'pass'}
    assert data['model_hash'] == amplitude_damping(1.0).fingerprint()
