import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from qhier_app.dependencies import stream
from qhier_app.exceptions import ArgumentError, SpecParseError, ValidationFailed
from qhier_app.hamiltonians.builders import HEISENBERG_COUPLING, chain_edges, heisenberg_model, random_model
from qhier_app.hamiltonians.hspec import parse_spec, render_spec, summary_table
from qhier_app.hamiltonians.model import (
    KLocalHamiltonian,
    LocalTerm,
    assemble_full,
    embed_in_higher_locality,
    energy,
    ensure_valid,
    group_by_locality,
    lift_to_locality,
    validate,
)
from qhier_app.hamiltonians.schemas import SModelSummary
from qhier_app.hamiltonians.utils import format_complex, parse_complex
from qhier_app.hilbert.core import SpaceShape, embed_local, random_state


def test_parse_heisenberg_text(heisenberg_text):
    model = parse_spec(heisenberg_text)
    assert (model.n, model.d, model.k, model.m) == (3, 2, 2, 6)
    assert model.class_counts() == {2: 6}
    reference = heisenberg_model(3, 2, chain_edges(3))
    assert np.allclose(assemble_full(model).matrix, assemble_full(reference).matrix)


def test_parse_accepts_crlf_and_comments():
    text = 'sites 1 2   # one qubit\r\nterm [0] Z 0.5\r\n'
    model = parse_spec(text)
    assert np.allclose(model.terms[0].matrix, np.diag([0.5, -0.5]))


def test_parse_matrix_term():
    text = 'sites 2 2\nterm [1] mat 2\n 0 1-1i\n 1+1i 0\n'
    model = parse_spec(text)
    assert np.allclose(model.terms[0].matrix, [[0, 2 - 2j], [2 + 2j, 0]])


def test_empty_file_is_missing_header():
    with pytest.raises(SpecParseError) as info:
        parse_spec('')
    assert 'missing sites header' in info.value.detail
    assert info.value.exit_code == 2


def test_bad_site_index_names_line():
    with pytest.raises(SpecParseError) as info:
        parse_spec('sites 2 2\n\nterm [0,5] XX\n')
    [diagnostic] = info.value.diagnostics
    assert diagnostic.line == 3
    assert 'site 5' in diagnostic.message


def test_collects_several_diagnostics():
    text = 'sites 2 3\nterm [0] Z\nterm [0,0] mat\n1 0 0 0 0 0 0 0 0\n'
    with pytest.raises(SpecParseError) as info:
        parse_spec(text)
    assert len(info.value.diagnostics) >= 2
    assert 'Pauli strings need d = 2' in info.value.diagnostics[0].message


def test_non_hermitian_term_rejected():
    with pytest.raises(SpecParseError) as info:
        parse_spec('sites 1 2\nterm [0] mat\n0 1\n0 0\n')
    assert 'not hermitian' in info.value.detail


def test_truncated_matrix():
    with pytest.raises(SpecParseError) as info:
        parse_spec('sites 1 2\nterm [0] mat\n0 1\n')
    assert 'matrix ended' in info.value.detail


@pytest.mark.parametrize('token, value', [('1', 1), ('-0.5i', -0.5j), ('0.25-1e-3i', 0.25 - 1e-3j)])
def test_parse_complex(token, value):
    assert parse_complex(token) == value


@pytest.mark.parametrize('token', ['1j', 'inf', 'nan+1i', 'x'])
def test_parse_complex_rejects(token):
    with pytest.raises(ValueError):
        parse_complex(token)


def test_format_complex_keeps_negative_zero():
    assert format_complex(complex(1.5, -0.0)) == '1.5-0.0i'


@hyp_settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 4), d=st.integers(2, 3), k=st.integers(1, 3))
def test_render_parse_round_trip(seed, n, d, k):
    model = random_model(stream(seed, 'hspec'), n, d, min(k, n))
    assert parse_spec(render_spec(model)).same_terms(model)


def test_summary_table_lists_classes():
    table = summary_table(heisenberg_model(4))
    assert 'm = 7' in table.splitlines()
    assert 'full dim = 16' in table


def test_group_by_locality_keeps_term_order():
    h = heisenberg_model(4)
    groups = group_by_locality(h)
    assert list(groups) == [1, 2]
    assert [t.sites for t in groups[1]] == [(0,), (1,), (2,), (3,)]
    assert [t.sites for t in groups[2]] == [(0, 1), (1, 2), (2, 3)]


def test_model_summary_schema():
    summary = SModelSummary.of(heisenberg_model(4))
    data = summary.model_dump(by_alias=True)
    assert data['schema'] == 'qhier/1'
    assert data['full_dim'] == 16


def test_heisenberg_defaults_need_qubits():
    with pytest.raises(ArgumentError):
        heisenberg_model(3, d=3)


def test_heisenberg_ring_edges():
    assert chain_edges(4, ring=True)[-1] == (3, 0)
    assert chain_edges(2, ring=True) == [(0, 1)]


def test_energy_matches_dense(rng):
    model = random_model(rng, 4, 2, 3)
    psi = random_state(rng, model.full_dim)
    dense = np.vdot(psi, assemble_full(model).matrix @ psi).real
    assert abs(energy(model, psi) - dense) < 1e-12


def test_validate_reports_locality_and_range():
    model = KLocalHamiltonian(n=2, d=2, terms=(LocalTerm((0, 2), HEISENBERG_COUPLING),))
    messages = [diag.message for diag in validate(model, k=1)]
    assert any('locality 2 exceeds' in m for m in messages)
    assert any('out of range' in m for m in messages)


def test_builders_enforce_declared_locality():
    with pytest.raises(ValidationFailed, match='locality 3 exceeds k = 2'):
        heisenberg_model(3, edges=[(0, 1, 2)], couplings=[np.eye(8)])
    model = KLocalHamiltonian(n=3, d=2, terms=(LocalTerm((0, 1), HEISENBERG_COUPLING),))
    with pytest.raises(ValidationFailed):
        ensure_valid(model, k=1)
    assert ensure_valid(model) is model


def test_assemble_rejects_invalid_model():
    model = KLocalHamiltonian(n=1, d=2, terms=(LocalTerm((0,), [[0, 1], [0, 0]]),))
    with pytest.raises(ValidationFailed):
        assemble_full(model)


def test_embed_in_higher_locality_preserves_operator(rng):
    model = random_model(rng, 3, 2, 2)
    term = model.terms[0]
    lifted = embed_in_higher_locality(term, 3, [2, 1])
    shape = SpaceShape.uniform(3, 2)
    assert np.allclose(embed_local(lifted.matrix, lifted.sites, shape).matrix,
                       embed_local(term.matrix, term.sites, shape).matrix)


def test_lift_to_locality_uses_free_sites():
    term = LocalTerm((1,), np.diag([1.0, -1.0]))
    assert lift_to_locality(term, 2, 3).sites == (1, 0)
    with pytest.raises(ArgumentError):
        embed_in_higher_locality(term, 2, [1])
