"""End-to-end tests of the symcentral command line."""
import json

import pytest

from symcentral.cli.main import main
from symcentral.fixtures import fixture_path


def _fx(name):
    return str(fixture_path(name))


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _error(err):
    return json.loads(err[err.index('{\n'):])


def test_no_command_prints_help(capsys):
    code, out, _ = _run(capsys)
    assert code == 0
    assert 'symcentral' in out


def test_groups_list_and_show(capsys):
    code, out, _ = _run(capsys, 'groups', 'list')
    assert code == 0
    rows = {r['name']: r for r in json.loads(out)['groups']}
    assert rows['T_d']['order'] == 24
    assert 'order' not in rows['D_k']

    code, out, _ = _run(capsys, 'groups', 'show', 'D_4')
    assert code == 0
    data = json.loads(out)
    assert data['order'] == 8
    assert data['dim'] == 2


def test_groups_show_needs_a_name(capsys):
    code, _, err = _run(capsys, 'groups', 'show')
    assert code == 1
    assert 'needs a group name' in err


def test_unknown_group_is_invalid_input(capsys):
    code, _, err = _run(capsys, 'groups', 'show', 'Q_8')
    assert code == 3
    assert _error(err)['error'] == 'UnknownName'


def test_orbits_table(capsys):
    code, out, _ = _run(capsys, 'orbits', '--group', 'D_3')
    assert code == 0
    data = json.loads(out)
    assert data['group'] == 'D_3'
    assert [r['orbit_size'] for r in data['orbit_types']] == [1, 3, 6]
    assert data['orbit_types'][1]['components'] == 2


def test_solve_writes_outputs(capsys, tmp_path):
    csv_path = tmp_path / 'points.csv'
    out_path = tmp_path / 'config.json'
    code, out, _ = _run(capsys, '--workers', '1', 'solve', '--ansatz', _fx('euler_equal_ansatz'),
                        '--seed', '1', '--starts', '4', '--csv', str(csv_path),
                        '--out', str(out_path))
    assert code == 0
    data = json.loads(out)
    assert data['solutions'][0]['U'] == pytest.approx(2.5 * 2.0 ** 0.5, rel=1e-9)
    assert csv_path.read_text().startswith('body,m,x1,x2')
    assert len(json.loads(out_path.read_text())['bodies']) == 3


def test_solve_output_is_reproducible(capsys):
    argv = ['--workers', '2', 'solve', '--ansatz', _fx('nested_triangles_ansatz'),
            '--seed', '5', '--starts', '4']
    _, first, _ = _run(capsys, *argv)
    _, second, _ = _run(capsys, *argv)
    assert first == second


def test_census(capsys):
    code, out, _ = _run(capsys, '--workers', '1', 'census',
                        '--ansatz', _fx('euler_collinear_ansatz'), '--starts', '64')
    assert code == 0
    data = json.loads(out)
    assert data['count'] == 3
    assert data['converged_count'] + data['failures'] == data['starts_used']


def test_bad_masses_ansatz_exits_with_invalid_input(capsys):
    code, _, err = _run(capsys, 'solve', '--ansatz', _fx('bad_masses_ansatz'))
    assert code == 3
    error = _error(err)
    assert error['error'] == 'InvalidAnsatz'
    assert error['exit_code'] == 3


def test_missing_file_exits_with_invalid_input(capsys, tmp_path):
    code, _, err = _run(capsys, 'verify', '--config', str(tmp_path / 'nothing.json'))
    assert code == 3
    assert _error(err)['error'] == 'InvalidInput'


def test_rigid_ansatz_is_a_numerical_failure(capsys, tmp_path):
    path = tmp_path / 'origin.json'
    path.write_text('{"group": "D_3", "slots": [{"type": "G"}]}')
    code, _, err = _run(capsys, 'solve', '--ansatz', str(path))
    assert code == 2
    assert _error(err)['error'] == 'RigidShape'


def test_usage_errors(capsys):
    assert _run(capsys, '--workers', '0', 'groups', 'list')[0] == 1
    assert _run(capsys, 'solve', '--ansatz', _fx('euler_equal_ansatz'), '--starts', '0')[0] == 1
    assert _run(capsys, 'launch')[0] == 1
    assert _run(capsys, 'dynamics', '--config', _fx('lagrange_triangle_config'),
                '--mode', 'spiral')[0] == 1


def test_verify(capsys):
    code, out, _ = _run(capsys, 'verify', '--config', _fx('lagrange_triangle_config'))
    assert code == 0
    data = json.loads(out)
    assert data['n'] == 3
    assert data['central_residual'] <= 1e-12
    assert data['balanced']['is_central'] is True
    assert 'group' not in data


def test_verify_with_group(capsys):
    code, out, _ = _run(capsys, 'verify', '--config', _fx('twelve_body_d3_config'),
                        '--group', 'D_3')
    assert code == 0
    data = json.loads(out)
    assert data['symmetric'] is True
    assert data['burnside'] == "1(Z2) + 1(Z2)' + 1(1)"

    code, out, _ = _run(capsys, 'verify', '--config', _fx('lagrange_123_config'),
                        '--group', 'D_4')
    data = json.loads(out)
    assert data['symmetric'] is False
    assert 'failing_generator' in data


def test_spectrum(capsys):
    code, out, _ = _run(capsys, 'spectrum', '--config', _fx('lagrange_triangle_config'))
    assert code == 0
    data = json.loads(out)
    assert data['spectrum'] == pytest.approx([1.5, 1.5])
    assert data['trace'] == pytest.approx(3.0)


def test_balanced(capsys):
    code, out, _ = _run(capsys, '--workers', '1', 'balanced',
                        '--ansatz', _fx('nested_triangles_ansatz'), '--sigma', '0.5,0.5')
    assert code == 0
    data = json.loads(out)
    assert data['target'] == [0.5, 0.5]
    assert data['residual'] <= 1e-8


def test_balanced_rejects_a_bad_target(capsys):
    code, _, err = _run(capsys, 'balanced', '--ansatz', _fx('nested_triangles_ansatz'),
                        '--sigma', '0.5,x')
    assert code == 3
    assert _error(err)['error'] == 'InvalidInput'


def test_dynamics(capsys, tmp_path):
    csv_path = tmp_path / 'traj.csv'
    code, out, _ = _run(capsys, 'dynamics', '--config', _fx('lagrange_triangle_config'),
                        '--mode', 'rotation', '--t-end', '0.5', '--dt', '1e-3',
                        '--csv', str(csv_path))
    assert code == 0
    data = json.loads(out)
    assert data['mode'] == 'rotation'
    assert data['max_deviation'] <= 1e-6
    assert csv_path.read_text().splitlines()[0].startswith('t,x1_1,x1_2')

    code, out, _ = _run(capsys, 'dynamics', '--config', _fx('lagrange_triangle_config'))
    assert code == 0
    assert json.loads(out)['max_deviation'] <= 1e-8


def test_scan_prints_csv(capsys):
    code, out, _ = _run(capsys, '--workers', '1', 'scan',
                        '--ansatz', _fx('euler_collinear_ansatz'),
                        '--slot', '2', '--mass', '3.0:3.5:3')
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 4
    assert lines[0].startswith('step,mass')


def test_scan_rejects_a_bad_range(capsys):
    code, _, _ = _run(capsys, 'scan', '--ansatz', _fx('euler_collinear_ansatz'),
                      '--slot', '2', '--mass', '1:2:0')
    assert code == 3


def test_components(capsys):
    code, out, _ = _run(capsys, 'components', '--ansatz', _fx('euler_collinear_ansatz'))
    assert code == 0
    data = json.loads(out)
    assert data['components'] == 3
    assert data['factors'][0]['kind'] == 'line'


def test_exponent_override(capsys):
    code, out, _ = _run(capsys, '--exponent', '2', 'verify',
                        '--config', _fx('lagrange_triangle_config'))
    assert code == 0
    assert json.loads(out)['central_residual'] <= 1e-12


def test_custom_config_file(capsys, tmp_path):
    cfg = tmp_path / 'my_config.yaml'
    cfg.write_text('solver:\n  starts: 2\n')
    code, out, _ = _run(capsys, '--config', str(cfg), '--workers', '1', 'solve',
                        '--ansatz', _fx('euler_equal_ansatz'))
    assert code == 0
    assert json.loads(out)['solutions'][0]['residual'] <= 1e-10
