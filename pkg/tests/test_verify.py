import pytest

from qhier_app.config import settings
from qhier_app.dependencies import (
    RunConfig,
    apply_tolerances,
    cap_override,
    csv_text,
    get_run_config,
    load_model,
    parse_tolerances,
    stream,
)
from qhier_app.exceptions import ArgumentError, SpecParseError
from qhier_app.hamiltonians.builders import heisenberg_model
from qhier_app.models import Suite
from qhier_app.schemas import residual
from qhier_app.verify.schemas import SVerifyReport
from qhier_app.verify.suites import run_suite


def failures(residuals):
    return [r.check for r in residuals if not r.passed]


def test_phase_suite_passes():
    residuals = run_suite(Suite.phase, settings.QHIER_SEED)
    assert not failures(residuals)
    assert {'phase.bracket', 'phase.jacobi', 'phase.implicit_midpoint.order'} <= {r.check for r in residuals}


def test_fock_suite_passes_with_model_checks():
    residuals = run_suite(Suite.fock, settings.QHIER_SEED, heisenberg_model(3))
    assert not failures(residuals)
    assert any(r.check == 'fock.model.field' for r in residuals)
    flagged = [r for r in residuals if r.flag == 'truncation-artifact']
    assert flagged and all(r.statistics == 'boson' for r in flagged)


def test_fock_suite_covers_boson_grid():
    residuals = run_suite(Suite.fock, settings.QHIER_SEED)
    ccr = [r for r in residuals if r.check.startswith('fock.statistics.ccr.')]
    assert {(r.d, r.cutoff) for r in ccr} == {(d, n) for d in range(1, 5) for n in range(1, 6)}
    assert all(r.passed for r in ccr)


def test_hierarchy_suite_labels_checks():
    residuals = run_suite(Suite.hierarchy, settings.QHIER_SEED)
    labels = {r.check.rpartition('@')[2] for r in residuals}
    assert labels == {'oscillator', 'harmonic', 'quartic', 'qubit-boson', 'qubit-fermion'}


def test_suites_are_reproducible():
    first = run_suite(Suite.hierarchy, 11)
    second = run_suite(Suite.hierarchy, 11)
    assert [r.residual for r in first] == [r.residual for r in second]


def test_verify_report_lists_failures():
    records = [residual('a.ok', 1e-14, 1e-12), residual('a.bad', 1.0, 1e-12),
               residual('a.edge', 1.0, 1e-12, flag='truncation-artifact')]
    report = SVerifyReport.of('all', 7, None, records)
    assert report.failures == ['a.bad']
    assert not report.passed
    assert '"pass": false' in report.dump()


def test_tolerance_patterns_last_match_wins():
    config = RunConfig(tolerances=parse_tolerances(['fock.*=1e-3', 'fock.field=1e-5']))
    assert config.tolerance('fock.field', 1e-12) == 1e-5
    assert config.tolerance('fock.bracket', 1e-12) == 1e-3
    assert config.tolerance('phase.bracket', 1e-12) == 1e-12


def test_apply_tolerances_rejudges_records():
    config = RunConfig(tolerances={'x.*': 1e-20})
    [loose, flagged] = apply_tolerances(config, [residual('x.a', 1e-15, 1e-12),
                                                 residual('x.b', 1.0, 1e-12, flag='truncation-artifact')])
    assert not loose.passed
    assert loose.tolerance == 1e-20
    assert flagged.passed


@pytest.mark.parametrize('items', [['fock.*'], ['=1e-3'], ['fock.*=abc']])
def test_parse_tolerances_rejects_malformed(items):
    with pytest.raises(ArgumentError):
        parse_tolerances(items)


def test_run_config_validation():
    with pytest.raises(ArgumentError):
        get_run_config(None, ['a=-1'], None, 'padded', None, None)
    with pytest.raises(ArgumentError):
        get_run_config(None, [], 2, 'padded', None, None)
    config = get_run_config(None, [], None, 'directsum', None, 'csv')
    assert config.seed == settings.QHIER_SEED
    assert config.cap == settings.QHIER_CAP


def test_cap_override_restores():
    previous = settings.QHIER_CAP
    with cap_override(64):
        assert settings.QHIER_CAP == 64
    assert settings.QHIER_CAP == previous


def test_named_streams_are_independent():
    a = stream(7, 'a').random(4)
    assert (stream(7, 'a').random(4) == a).all()
    assert not (stream(7, 'b').random(4) == a).all()
    assert not (stream(8, 'a').random(4) == a).all()


def test_csv_text_uses_full_precision():
    text = csv_text(['t', 'x'], [[0.1, 1 / 3]])
    assert text == 't,x\n0.10000000000000001,0.33333333333333331\n'


def test_load_model_sources(heisenberg_file, tmp_path):
    assert load_model('heisenberg:5').m == 9
    assert load_model('heisenberg-ring:5').m == 10
    assert load_model(str(heisenberg_file)).m == 6
    bad = tmp_path / 'bad.hspec'
    bad.write_text('sites 2 2\nterm [0] Q\n', encoding='utf-8')
    with pytest.raises(SpecParseError):
        load_model(str(bad))
    with pytest.raises(ArgumentError):
        load_model(str(tmp_path / 'missing.hspec'))
