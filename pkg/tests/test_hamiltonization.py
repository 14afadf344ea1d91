import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from qhier_app.dependencies import stream
from qhier_app.exceptions import ArgumentError, ValidationFailed
from qhier_app.hamiltonization.ehrenfest import central_derivative, ehrenfest_reduce
from qhier_app.hamiltonization.integrators import convergence_ratio, integrate_symplectic
from qhier_app.hamiltonization.phase_space import (
    ObservableField,
    PhaseSpacePoint,
    bracket_field,
    hamilton_vector_field,
    hamiltonize,
    jacobi_residual_classical,
    poisson_bracket_classical,
    poisson_dynamics_residual,
)
from qhier_app.hamiltonization.schemas import STrajectorySummary
from qhier_app.hilbert.core import PAULI, commutator, evolve_exact, random_hermitian, random_state
from qhier_app.models import IntegrationMethod


def test_vector_field_is_schrodinger(rng):
    h = random_hermitian(rng, 5)
    p = PhaseSpacePoint(random_state(rng, 5))
    psi_dot, zeta_dot = hamilton_vector_field(hamiltonize(h), p)
    assert np.allclose(psi_dot, -1j * h @ p.psi, atol=1e-13)
    assert np.allclose(zeta_dot, 1j * (1j * h.T @ p.psi.conj()), atol=1e-13)


def test_zeta_chart():
    p = PhaseSpacePoint([1 + 2j, 3j])
    assert np.allclose(p.zeta, [1j * (1 - 2j), 1j * -3j])
    assert np.allclose(PhaseSpacePoint.from_real(p.to_real()).psi, p.psi)


def test_bracket_equals_commutator_expectation(rng):
    for _ in range(20):
        d = int(rng.integers(2, 7))
        f, g = ObservableField(random_hermitian(rng, d)), ObservableField(random_hermitian(rng, d))
        bracket, identity = poisson_bracket_classical(f, g, PhaseSpacePoint(random_state(rng, d)))
        assert abs(bracket - identity) < 1e-10


def test_bracket_is_antisymmetric(rng):
    f, g = ObservableField(random_hermitian(rng, 4)), ObservableField(random_hermitian(rng, 4))
    p = PhaseSpacePoint(random_state(rng, 4))
    assert abs(poisson_bracket_classical(f, g, p)[0] + poisson_bracket_classical(g, f, p)[0]) < 1e-12


@hyp_settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), d=st.integers(1, 5), a=st.floats(-3.0, 3.0), b=st.floats(-3.0, 3.0))
def test_bracket_is_bilinear_and_antisymmetric(seed, d, a, b):
    rng = stream(seed, 'bracket.classical')
    f, g, e = (random_hermitian(rng, d) for _ in range(3))
    p = PhaseSpacePoint(random_state(rng, d))
    field = {name: ObservableField(m) for name, m in (('f', f), ('g', g), ('e', e), ('mix', a * f + b * g))}

    def bracket(x, y):
        return poisson_bracket_classical(field[x], field[y], p)[0]

    assert abs(bracket('mix', 'e') - (a * bracket('f', 'e') + b * bracket('g', 'e'))) < 1e-10
    assert abs(bracket('f', 'g') + bracket('g', 'f')) < 1e-12
    mixed = bracket_field(field['mix'], field['e']).matrix
    linear = a * bracket_field(field['f'], field['e']).matrix + b * bracket_field(field['g'], field['e']).matrix
    assert np.allclose(mixed, linear, atol=1e-10)


def test_jacobi_identity(rng):
    f, g, e = (ObservableField(random_hermitian(rng, 4)) for _ in range(3))
    assert jacobi_residual_classical(f, g, e, PhaseSpacePoint(random_state(rng, 4))) < 1e-9


def test_hamilton_equations_in_bracket_form(rng):
    sys = hamiltonize(random_hermitian(rng, 6))
    assert poisson_dynamics_residual(sys, PhaseSpacePoint(random_state(rng, 6))) < 1e-12


def test_dimension_mismatch():
    with pytest.raises(ArgumentError):
        hamilton_vector_field(hamiltonize(PAULI['Z']), PhaseSpacePoint([1, 0, 0]))


def test_observable_must_be_hermitian():
    with pytest.raises(ValidationFailed):
        ObservableField(np.array([[0, 1], [0, 0]]))


def test_midpoint_conserves_energy_and_norm(rng):
    sys = hamiltonize(random_hermitian(rng, 4))
    trajectory = integrate_symplectic(sys, PhaseSpacePoint(random_state(rng, 4)), 1e-3, 10_000)
    assert trajectory.energy_drift < 1e-8
    assert trajectory.norm_drift < 1e-8
    assert trajectory.times[-1] == pytest.approx(10.0)


def test_midpoint_on_qubit_tracks_exact_phase():
    trajectory = integrate_symplectic(hamiltonize(PAULI['Z']), PhaseSpacePoint([1, 0]), 1e-3, 1000)
    exact = evolve_exact(PAULI['Z'], [1, 0], 1.0).amplitudes
    assert np.max(np.abs(trajectory.states[-1] - exact)) < 1e-6


@pytest.mark.parametrize('method', list(IntegrationMethod))
def test_second_order_convergence(rng, method):
    sys = hamiltonize(random_hermitian(rng, 4))
    ratio = convergence_ratio(sys, PhaseSpacePoint(random_state(rng, 4)), 0.02, 1.0, method)
    assert 3.5 <= ratio <= 4.5


def test_zero_steps_returns_initial_point(rng):
    psi = random_state(rng, 3)
    trajectory = integrate_symplectic(hamiltonize(random_hermitian(rng, 3)), PhaseSpacePoint(psi), 0.1, 0)
    assert len(trajectory.rows()) == 1
    assert np.array_equal(trajectory.states[0], psi)


def test_integrator_rejects_bad_step(rng):
    sys = hamiltonize(PAULI['X'])
    with pytest.raises(ArgumentError):
        integrate_symplectic(sys, PhaseSpacePoint([1, 0]), 0.0, 10)
    with pytest.raises(ArgumentError):
        integrate_symplectic(sys, PhaseSpacePoint([1, 0]), 0.1, -1)


def test_trajectory_rows_match_header(rng):
    trajectory = integrate_symplectic(hamiltonize(PAULI['X']), PhaseSpacePoint([1, 0]), 0.1, 3,
                                      IntegrationMethod.leapfrog_reim)
    header = trajectory.header()
    assert header == ['t', 're_psi_0', 'im_psi_0', 're_psi_1', 'im_psi_1', 'energy', 'norm']
    assert all(len(row) == len(header) for row in trajectory.rows())
    summary = STrajectorySummary.of(trajectory, 0.1)
    assert summary.steps == 3 and summary.method == 'leapfrog_reim'


def test_ehrenfest_derivative_matches_commutator(rng):
    h = random_hermitian(rng, 4)
    x = random_hermitian(rng, 4)
    dt = 1e-4
    series = ehrenfest_reduce(h, random_state(rng, 4), [ObservableField(x), ObservableField(1j * commutator(h, x))],
                              np.arange(0, 101) * dt)
    derivative = central_derivative(series.column(0), dt)
    assert np.max(np.abs(derivative - series.column(1)[1:-1])) < 1e-5


def test_ehrenfest_energy_is_constant(rng):
    h = random_hermitian(rng, 3)
    series = ehrenfest_reduce(h, random_state(rng, 3), [ObservableField(h)], np.linspace(0, 5, 11))
    assert series.spread(0) < 1e-12
