import json
import logging
import math

import pytest

from main import app


@pytest.fixture(autouse=True)
def detach_cli_logging():
    yield
    logger = logging.getLogger('qhier_app')
    logger.handlers.clear()
    logger.propagate = True


def csv_rows(text):
    lines = text.strip().splitlines()
    header = lines[0].split(',')
    return header, [[float(v) for v in line.split(',')] for line in lines[1:]]


def test_parse_prints_summary(runner, heisenberg_file):
    result = runner.invoke(app, ['parse', str(heisenberg_file)])
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert 'n = 3' in lines
    assert 'm = 6' in lines
    assert 'full dim = 8' in lines


def test_parse_reports_diagnostics(runner, tmp_path):
    path = tmp_path / 'bad.hspec'
    path.write_text('sites 2 2\n\nterm [0,5] XX\n', encoding='utf-8')
    result = runner.invoke(app, ['parse', str(path)])
    assert result.exit_code == 1
    assert f'{path}:3:' in result.stderr
    assert result.stdout == ''


def test_parse_empty_file(runner, tmp_path):
    path = tmp_path / 'empty.hspec'
    path.write_text('', encoding='utf-8')
    result = runner.invoke(app, ['parse', str(path)])
    assert result.exit_code == 1
    assert 'missing sites header' in result.stderr


def test_parse_render_round_trip(runner, heisenberg_file, tmp_path):
    result = runner.invoke(app, ['parse', '--render', str(heisenberg_file)])
    assert result.exit_code == 0
    assert result.stdout.splitlines()[0] == 'sites 3 2'
    rendered = tmp_path / 'rendered.hspec'
    rendered.write_text(result.stdout, encoding='utf-8')
    first = runner.invoke(app, ['parse', '--json', str(heisenberg_file)])
    second = runner.invoke(app, ['parse', '--json', str(rendered)])
    assert first.stdout == second.stdout


def test_parse_json(runner):
    result = runner.invoke(app, ['parse', '--json', 'heisenberg:4'])
    data = json.loads(result.stdout)
    assert data['schema'] == 'qhier/1'
    assert data['m'] == 7
    assert data['classes'] == [{'locality': 1, 'count': 4}, {'locality': 2, 'count': 3}]


def test_missing_file_is_an_argument_error(runner, tmp_path):
    result = runner.invoke(app, ['parse', str(tmp_path / 'nope.hspec')])
    assert result.exit_code == 2
    assert result.stderr.startswith('error: cannot read')


def test_bad_tolerance_is_an_argument_error(runner):
    result = runner.invoke(app, ['--tol', 'no-equals-sign', 'parse', 'heisenberg:2'])
    assert result.exit_code == 2
    assert 'error: --tol expects' in result.stderr


def test_hierarchy_oscillator(runner):
    result = runner.invoke(app, ['hierarchy', 'oscillator'])
    assert result.exit_code == 0, result.stderr
    assert 'spectrum: 0 1 2 3 4 5' in result.stderr
    data = json.loads(result.stdout)
    assert data['example'] == 'oscillator'
    assert [level['dim'] for level in data['levels']] == [1, 1, 6, 6, 28]


def test_hierarchy_respects_cap(runner):
    result = runner.invoke(app, ['--cap', '16', 'hierarchy', 'oscillator'])
    assert result.exit_code == 3
    assert 'exceeds the cap 16' in result.stderr


def test_eclectic_dimension_table(runner):
    result = runner.invoke(app, ['eclectic', 'heisenberg:10', '--sweep', '10:10'])
    assert result.exit_code == 0, result.stderr
    assert '1024' in result.stderr
    assert '400' in result.stderr
    data = json.loads(result.stdout)
    assert data['dims'] == {'full': 1024, 'padded': 400, 'direct_sum': 76}
    assert data['total']['pass']


def test_eclectic_direct_sum_to_file(runner, tmp_path):
    out = tmp_path / 'report.json'
    result = runner.invoke(app, ['--layout', 'directsum', '--out', str(out), 'eclectic', 'heisenberg:3'])
    assert result.exit_code == 0, result.stderr
    assert result.stdout == ''
    data = json.loads(out.read_text(encoding='utf-8'))
    assert data['layout'] == 'directsum'
    assert data['dims']['direct_sum'] == 20


def test_eclectic_state_file(runner, tmp_path):
    state = tmp_path / 'psi.txt'
    state.write_text('0 1 -1 0\n', encoding='utf-8')
    result = runner.invoke(app, ['eclectic', 'heisenberg:2', '--state', str(state)])
    assert result.exit_code == 0, result.stderr
    data = json.loads(result.stdout)
    assert data['state'] == 'file'
    assert data['total']['E_full'] == pytest.approx(-3.0)


def test_verify_is_reproducible(runner):
    first = runner.invoke(app, ['--seed', '7', 'verify', '--suite', 'hierarchy'])
    second = runner.invoke(app, ['--seed', '7', 'verify', '--suite', 'hierarchy'])
    assert first.exit_code == second.exit_code
    assert first.stdout == second.stdout
    assert json.loads(first.stdout)['seed'] == 7


def test_verify_tolerance_override_fails(runner):
    result = runner.invoke(app, ['--tol', 'hierarchy.oscillator.ehrenfest*=1e-300', 'verify', '--suite', 'hierarchy'])
    assert result.exit_code == 1
    assert 'failed: hierarchy.oscillator.ehrenfest@oscillator' in result.stderr
    data = json.loads(result.stdout)
    assert 'hierarchy.oscillator.ehrenfest@oscillator' in data['failures']


def test_evolve_symplectic_conserves_energy(runner):
    result = runner.invoke(app, ['evolve', 'oscillator', '--engine', 'symplectic', '--t', '0.1', '--dt', '0.01',
                                 '--init', 'basis:1'])
    assert result.exit_code == 0, result.stderr
    header, rows = csv_rows(result.stdout)
    assert header[0] == 't'
    assert header[-2:] == ['energy', 'norm']
    assert len(rows) == 11
    assert all(abs(row[-2] - 1.0) < 1e-10 for row in rows)


def test_evolve_symplectic_stride(runner):
    result = runner.invoke(app, ['evolve', 'oscillator', '--engine', 'symplectic', '--t', '0.1', '--dt', '0.01',
                                 '--stride', '4'])
    _, rows = csv_rows(result.stdout)
    assert [round(row[0], 10) for row in rows] == [0.0, 0.04, 0.08, 0.1]


def test_evolve_short_horizon_reaches_end_time(runner):
    result = runner.invoke(app, ['evolve', 'oscillator', '--engine', 'symplectic', '--t', '0.004', '--dt', '0.01'])
    assert result.exit_code == 0, result.stderr
    _, rows = csv_rows(result.stdout)
    assert len(rows) == 2
    assert rows[-1][0] == pytest.approx(0.004)


def test_evolve_lindblad_damping(runner):
    result = runner.invoke(app, ['evolve', 'damping', '--engine', 'lindblad', '--init', 'basis:1', '--t', '1',
                                 '--points', '4'])
    assert result.exit_code == 0, result.stderr
    header, rows = csv_rows(result.stdout)
    assert header[-1] == 'trace'
    assert len(rows) == 5
    excited = header.index('re_rho_1_1')
    assert abs(rows[-1][excited] - math.exp(-1.0)) < 1e-8
    assert all(abs(row[-1] - 1.0) < 1e-12 for row in rows)


def test_evolve_at_time_zero(runner):
    result = runner.invoke(app, ['evolve', 'heisenberg:2', '--t', '0', '--init', 'basis:0'])
    assert result.exit_code == 0, result.stderr
    header, rows = csv_rows(result.stdout)
    assert len(rows) == 1
    assert rows[0][header.index('re_psi_0')] == 1.0


def test_evolve_json_report(runner):
    result = runner.invoke(app, ['--format', 'json', 'evolve', 'oscillator', '--engine', 'symplectic', '--t', '0.1',
                                 '--dt', '0.01', '--init', 'basis:1'])
    data = json.loads(result.stdout)
    assert data['engine'] == 'symplectic'
    assert data['trajectory']['steps'] == 10
    assert data['trajectory']['method'] == 'implicit_midpoint'
    assert len(data['rows']) == 11
    assert data['ensemble'] is None


def test_evolve_sse_report(runner):
    result = runner.invoke(app, ['--format', 'json', 'evolve', 'damping', '--engine', 'sse', '--t', '0.2',
                                 '--dt', '0.01', '--n-traj', '50', '--init', 'basis:1', '--points', '2'])
    assert result.exit_code == 0, result.stderr
    data = json.loads(result.stdout)
    assert data['ensemble']['n_traj'] == 50
    assert data['columns'][-2:] == ['l1_error', 'bound']
    assert len(data['rows']) == 2


def test_evolve_bad_initial_state(runner):
    result = runner.invoke(app, ['evolve', 'damping', '--init', 'basis:9'])
    assert result.exit_code == 2
    assert result.stderr.startswith('error: --init expects')
