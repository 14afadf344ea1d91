import logging

import numpy as np
import pytest

from qhier_app.eclectic.local import extract_local_state, local_energy, partial_amplitudes
from qhier_app.eclectic.many_body import (
    product_fock_state,
    second_quantized_many_body,
    separable_form,
    separable_gap_report,
    separable_space,
)
from qhier_app.eclectic.schemas import SEclecticReport
from qhier_app.eclectic.system import (
    build_eclectic,
    ceil_root,
    dimension_report,
    dimension_row,
    eclectic_state,
    eclectic_state_from_locals,
    format_dimension_table,
    padding_size,
    verify_energy_identity,
)
from qhier_app.exceptions import ArgumentError, ResourceError
from qhier_app.hamiltonians.builders import chain_edges, heisenberg_model, random_model
from qhier_app.hamiltonians.model import assemble_full, term_energy
from qhier_app.hilbert.core import random_state
from qhier_app.models import ExtractionMethod, Layout, Statistics


@pytest.mark.parametrize('m, k, root', [(1, 1, 1), (9, 2, 3), (10, 2, 4), (16, 2, 4), (27, 3, 3), (28, 3, 4)])
def test_ceil_root(m, k, root):
    assert ceil_root(m, k) == root


@pytest.mark.parametrize('n, full, padded, direct_sum', [(10, 1024, 400, 76), (12, 4096, 576, 92), (3, 8, 36, 20)])
def test_heisenberg_dimension_rows(n, full, padded, direct_sum):
    row = dimension_row(heisenberg_model(n, 2, chain_edges(n)))
    assert (row.full, row.padded, row.direct_sum) == (full, padded, direct_sum)
    assert row.n_bar == n
    assert row.crossover is (padded >= full)


def test_small_chain_crossover_is_warned(caplog, monkeypatch):
    monkeypatch.setattr(logging.getLogger('qhier_app'), 'propagate', True)
    caplog.set_level(logging.WARNING, logger='qhier_app')
    rows = dimension_report(sweep=range(2, 15))
    assert [row.n for row in rows if row.crossover] == [2, 3, 4, 5, 6, 7, 8]
    assert any('crossover at n = 2' in message for message in caplog.messages)
    assert (rows[0].full, rows[0].padded) == (4, 16)


def test_dimension_table_marks_crossover():
    table = format_dimension_table(dimension_report(sweep=[2, 10], warn=False))
    lines = table.splitlines()
    assert lines[1].endswith('crossover')
    assert '1024' in lines[2] and '400' in lines[2] and not lines[2].endswith('crossover')


def test_partial_amplitudes_norm_and_local_energy(rng):
    model = random_model(rng, 4, 2, 3)
    psi = random_state(rng, model.full_dim)
    for term in model.terms:
        family = partial_amplitudes(psi, term, model)
        assert abs(family.norm_identity() - 1.0) < 1e-12
        assert len(family.index_tuples(model.d)) == family.vectors.shape[0]
        assert abs(local_energy(psi, term, model) - term_energy(model, term, psi)) < 1e-10


def test_extraction_on_product_state_uses_reduced_state():
    model = heisenberg_model(2, 2, chain_edges(2), h=0.5)
    psi = np.kron([1, 0], [0, 1]).astype(complex)
    local = extract_local_state(psi, model.terms[2], model)
    assert local.method is ExtractionMethod.pure_reduced_state
    assert local.delta < 1e-10


def test_extraction_on_entangled_state_interpolates(rng):
    model = random_model(rng, 3, 2, 2)
    psi = random_state(rng, model.full_dim)
    for term in model.terms:
        local = extract_local_state(psi, term, model)
        assert local.method is ExtractionMethod.eigenvector_interpolation
        assert local.delta < 1e-10
        assert abs(np.linalg.norm(local.state) - 1.0) < 1e-12


@pytest.mark.parametrize('layout', list(Layout))
def test_energy_identity_random_models(rng, layout):
    for _ in range(10):
        n = int(rng.integers(2, 6))
        model = random_model(rng, n, int(rng.integers(2, 4)), int(rng.integers(1, min(n, 3) + 1)))
        psi = random_state(rng, model.full_dim)
        identity = verify_energy_identity(psi, build_eclectic(model, layout))
        assert identity.delta < 1e-9
        assert identity.passed
        assert max(t.delta for t in identity.per_term) < 1e-9
        assert abs(identity.energy_normalized - identity.energy_full) < 1e-9


@pytest.mark.parametrize('layout', list(Layout))
def test_matvec_matches_dense(rng, layout):
    model = random_model(rng, 3, 2, 2)
    system = build_eclectic(model, layout)
    v = random_state(rng, system.dim)
    assert np.allclose(system.matvec(v), system.dense() @ v, atol=1e-12)


def test_padded_layout_registers():
    model = heisenberg_model(3, 2, chain_edges(3))
    system = build_eclectic(model, Layout.padded_tensor)
    assert system.n_bar == 3 and system.dim == 36
    assert [b.register for b in system.class_blocks(2)] == [(0, 0), (0, 1)]
    assert [b.register for b in system.class_blocks(1)] == [(0,), (1,), (2,)]


def test_padded_class_operator_blocks_do_not_overlap():
    model = heisenberg_model(4, 2, chain_edges(4))
    system = build_eclectic(model, Layout.padded_tensor)
    rows = [set(system.block_indices(b).tolist()) for b in system.class_blocks(2)]
    assert all(not (a & b) for i, a in enumerate(rows) for b in rows[i + 1:])


def test_direct_sum_vector_and_padding(rng):
    model = random_model(rng, 3, 2, 2)
    system = build_eclectic(model, Layout.per_term_direct_sum)
    state = eclectic_state(random_state(rng, model.full_dim), system)
    assert state.vector().shape == (system.dim,)
    assert abs(np.linalg.norm(state.vector(normalized=True)) - 1.0) < 1e-12
    with pytest.raises(ArgumentError):
        eclectic_state(random_state(rng, model.full_dim), build_eclectic(model)).vector()


def test_states_from_locals_are_unverified(rng):
    model = heisenberg_model(2, 2, chain_edges(2))
    system = build_eclectic(model)
    states = [random_state(rng, term.matrix.shape[0]) for term in model.terms]
    state = eclectic_state_from_locals(system, states)
    assert state.consistency == 'unverified'
    with pytest.raises(ArgumentError):
        eclectic_state_from_locals(system, states[:1])


def test_build_respects_cap():
    with pytest.raises(ResourceError):
        build_eclectic(heisenberg_model(10, 2, chain_edges(10)), Layout.padded_tensor, cap=100)


def test_report_schema(rng):
    model = heisenberg_model(3, 2, chain_edges(3))
    psi = random_state(rng, model.full_dim)
    system = build_eclectic(model)
    state = eclectic_state(psi, system)
    identity = verify_energy_identity(psi, system, state=state)
    report = SEclecticReport.build(identity, system, 'random', [local.method for local in state.locals],
                                   dimension_report(model, warn=False))
    data = report.model_dump(by_alias=True)
    assert data['schema'] == 'qhier/1'
    assert data['total']['pass'] is True
    assert data['dims'] == {'full': 8, 'padded': 36, 'direct_sum': 20}


@pytest.mark.parametrize('statistics', list(Statistics))
def test_many_body_field(rng, statistics):
    model = random_model(rng, 3, 2, 2)
    field = second_quantized_many_body(model, statistics)
    assert field.one_excitation_residual() < 1e-13
    psi = random_state(rng, model.full_dim)
    assert abs(field.energy(field.composite_state(psi)) - np.vdot(psi, assemble_full(model).matrix @ psi).real) < 1e-9


def test_separable_form_on_product_states(rng):
    model = random_model(rng, 3, 2, 2)
    space = separable_space(model)
    assert space.modes == 6 and space.cutoff == 3
    hsep = separable_form(model, space)
    factors = [random_state(rng, 2) for _ in range(3)]
    product = np.kron(np.kron(factors[0], factors[1]), factors[2])
    chi = product_fock_state(factors, space, 2)
    expected = np.vdot(product, assemble_full(model).matrix @ product).real
    assert abs(np.vdot(chi, hsep.matrix @ chi).real - expected) < 1e-12

    gap = separable_gap_report(model, product, hsep)
    assert gap.identity_claimed and gap.gap < 1e-10


def test_separable_gap_for_entangled_state(rng):
    model = heisenberg_model(2, 2, chain_edges(2))
    singlet = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    gap = separable_gap_report(model, singlet)
    assert not gap.identity_claimed
    assert gap.identity_residual < 1e-12
    assert gap.gap > 1.0


def test_padding_size_is_max_over_classes():
    model = random_model(np.random.default_rng(0), 5, 2, 3, m=9)
    counts = model.class_counts()
    assert padding_size(model) == max(ceil_root(c, k) for k, c in counts.items())
