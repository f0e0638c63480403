import csv
import json
import os
import time

import pytest

from toboggan import toboggan
from toboggan.cli import main
from toboggan.toboggan import default_s_max, parse_epsilon, parse_seeds
from toboggan.errors import ValidationError
from toboggan.utils.critical import critical_value
from toboggan.utils.spectral import EigenResult


def _rows(path):
    with open(path, newline='') as csv_file:
        return list(csv.reader(csv_file))


def _manifest(directory, name):
    with open(os.path.join(directory, name)) as manifest_file:
        return json.load(manifest_file)


def test_parse_epsilon():
    assert parse_epsilon('0.25').value == 0.25
    shifted = parse_epsilon('crit(2,1)-0.0005')
    assert shifted.value == pytest.approx(critical_value(2, 1) - 0.0005)
    assert shifted.critical.m == 2
    assert parse_epsilon('crit(1, 1) + 1e-4').value == pytest.approx(critical_value(1, 1) + 1e-4)
    assert parse_epsilon('crit(2,2)').value == critical_value(2, 2)
    for text in ('abc', 'crit(2,3)+0.1', 'crit(0,1)', 'crit(65,1)', 'crit(100000,1)'):
        with pytest.raises(ValidationError):
            parse_epsilon(text)


def test_parse_seeds():
    assert parse_seeds('1, 3,5+0.5i') == [1, 3, 5 + 0.5j]
    with pytest.raises(ValidationError):
        parse_seeds('one')
    with pytest.raises(ValidationError):
        parse_seeds(' , ')


def test_default_range_reaches_tail():
    assert default_s_max(1) == pytest.approx(6.0)
    assert 2.0 < default_s_max(3) < 2.1


def test_trace(tmp_path, capsys):
    assert main(['trace', '--kappa', '3', '--epsilon', '0.25', '--s-range', '8',
                 '--output', str(tmp_path)]) == 0
    assert 'descriptor = LR' in capsys.readouterr().out
    rows = _rows(tmp_path / 'trace_k3_e0.25.csv')
    assert rows[0] == ['s', 're_z', 'im_z', 're_x', 'im_x', 'sheet']
    assert rows[1][0] == '-8'
    manifest = _manifest(tmp_path, 'trace_k3_e0.25.manifest.json')
    assert manifest['command'] == 'trace'
    assert manifest['descriptor'] == 'LR'
    assert set(manifest['versions']) == {'toboggan', 'numpy', 'scipy', 'mpmath'}


def test_trace_json(tmp_path):
    target = tmp_path / 'contour.json'
    assert main(['trace', '--kappa', '5', '--epsilon', 'crit(2,1)-0.0005', '--output', str(target),
                 '--format', 'json']) == 0
    with open(target) as json_file:
        document = json.load(json_file)
    assert document['kappa'] == 5
    assert document['samples'][0]['s'] == -8.0
    assert (tmp_path / 'contour.manifest.json').exists()


def test_trace_rejects_negative_shift(tmp_path):
    assert main(['trace', '--kappa', '3', '--epsilon', '-1', '--output', str(tmp_path)]) == 2


def test_trace_rejects_even_kappa(tmp_path):
    assert main(['trace', '--kappa', '4', '--epsilon', '0.25', '--output', str(tmp_path)]) == 2


def test_trace_refuses_critical_shift(tmp_path):
    assert main(['trace', '--kappa', '3', '--epsilon', '0.34062502', '--output', str(tmp_path)]) == 3


def test_critical_single_row(tmp_path):
    assert main(['critical', '--M', '1', '--output', str(tmp_path)]) == 0
    rows = _rows(tmp_path / 'critical_M1.csv')
    assert len(rows) == 2
    # printed as ...64017, which is exact to 18 significant digits
    assert rows[1][3] == '0.34062501931660664019'


def test_critical_block(tmp_path, capsys):
    assert main(['critical', '--M', '6', '--output', str(tmp_path)]) == 0
    assert len(_rows(tmp_path / 'critical_M6.csv')) == 7
    assert capsys.readouterr().out.count('M=6') == 6


@pytest.mark.parametrize('M', ['0', '65'])
def test_critical_rejects_bad_M(tmp_path, M):
    assert main(['critical', '--M', M, '--output', str(tmp_path)]) == 2


@pytest.mark.parametrize('figure, kappa, descriptor', [(1, 3, 'LR'), (6, 5, 'LLRR'), (9, 5, 'RLRL')])
def test_figure(tmp_path, capsys, figure, kappa, descriptor):
    assert main(['figure', str(figure), '--output', str(tmp_path)]) == 0
    assert f'descriptor = {descriptor}' in capsys.readouterr().out
    manifest = _manifest(tmp_path, f'figure{figure}.manifest.json')
    assert manifest['kappa'] == kappa
    assert manifest['descriptor'] == descriptor
    assert manifest['outputs'] == [str(tmp_path / f'figure{figure}.csv')]


def test_figure_records_referenced_critical_shift(tmp_path):
    assert main(['figure', '9', '--output', str(tmp_path)]) == 0
    manifest = _manifest(tmp_path, 'figure9.manifest.json')
    assert manifest['critical']['epsilon'] == '0.49223342986833679826'
    assert manifest['epsilon'] == pytest.approx(critical_value(2, 2) + 0.005)


@pytest.mark.parametrize('figure', ['0', '10'])
def test_figure_rejects_unknown_id(tmp_path, figure):
    assert main(['figure', figure, '--output', str(tmp_path)]) == 2


def test_spectrum(tmp_path, capsys):
    assert main(['spectrum', '--kappa', '1', '--epsilon', '0.25', '--family', 'ho',
                 '--coupling', '0', '--seeds', '0.9,3.1', '--output', str(tmp_path)]) == 0
    rows = _rows(tmp_path / 'spectrum_ho_k1_e0.25.csv')
    assert rows[0] == ['re_E', 'im_E', 'residual', 'iterations', 'converged']
    assert [float(row[0]) for row in rows[1:]] == pytest.approx([1.0, 3.0], abs=1e-6)
    assert all(row[4] == 'true' for row in rows[1:])
    manifest = _manifest(tmp_path, 'spectrum_ho_k1_e0.25.manifest.json')
    assert manifest['params']['family'] == 'ho'
    assert manifest['shooting']['s_max'] == pytest.approx(6.0)


def test_spectrum_requires_family(tmp_path):
    with pytest.raises(SystemExit) as exit_info:
        main(['spectrum', '--kappa', '1', '--epsilon', '0.25', '--seeds', '1',
              '--output', str(tmp_path)])
    assert exit_info.value.code == 2


def test_spectrum_without_converged_seed(tmp_path, monkeypatch):
    def no_roots(problem, spec, shooting, seeds):
        return [EigenResult(complex(seed), 1.0, 50, False, complex(seed)) for seed in seeds]

    monkeypatch.setattr(toboggan, 'find_eigenvalues', no_roots)
    assert main(['spectrum', '--kappa', '1', '--epsilon', '0.25', '--family', 'ho',
                 '--seeds', '1.5', '--output', str(tmp_path)]) == 4
    assert len(_rows(tmp_path / 'spectrum_ho_k1_e0.25.csv')) == 2


def test_replay_reproduces_outputs(tmp_path):
    assert main(['figure', '7', '--output', str(tmp_path)]) == 0
    data = tmp_path / 'figure7.csv'
    first = data.read_bytes()
    data.unlink()
    assert main(['replay', str(tmp_path / 'figure7.manifest.json')]) == 0
    assert data.read_bytes() == first


def test_replay_into_new_location(tmp_path):
    assert main(['critical', '--M', '2', '--output', str(tmp_path)]) == 0
    target = tmp_path / 'again' / 'table.csv'
    assert main(['replay', str(tmp_path / 'critical_M2.manifest.json'), '--output',
                 str(target)]) == 0
    assert target.read_bytes() == (tmp_path / 'critical_M2.csv').read_bytes()


def test_replay_rejects_broken_manifest(tmp_path):
    broken = tmp_path / 'broken.manifest.json'
    broken.write_text('{"command": "trace"}')
    assert main(['replay', str(broken)]) == 2


def test_failed_seeds_are_null_in_json(tmp_path, monkeypatch):
    def failed(problem, spec, shooting, seeds):
        return [EigenResult(complex('nan+nanj'), float('inf'), 0, False, complex(seed))
                for seed in seeds]

    monkeypatch.setattr(toboggan, 'find_eigenvalues', failed)
    target = tmp_path / 'spectrum.json'
    assert main(['spectrum', '--kappa', '1', '--epsilon', '0.25', '--family', 'ho',
                 '--seeds', '1.5', '--output', str(target), '--format', 'json']) == 4
    document = json.loads(target.read_text(), parse_constant=pytest.fail)
    assert document[0]['energy'] == [None, None]
    assert document[0]['residual'] is None
    assert document[0]['seed'] == [1.5, 0.0]


def _elapsed(argv):
    start = time.perf_counter()
    assert main(argv) == 0
    return time.perf_counter() - start


def test_runtime_bounds(tmp_path):
    # coarse wall-clock guards for the table, a figure and a kappa=3 spectrum
    assert _elapsed(['critical', '--M', '6', '--output', str(tmp_path)]) < 1.0
    assert _elapsed(['figure', '9', '--output', str(tmp_path)]) < 5.0
    assert _elapsed(['spectrum', '--kappa', '3', '--epsilon', '0.25', '--family', 'ho',
                     '--seeds', '1.1,2.9,5.1,7.1', '--output', str(tmp_path)]) < 60.0
