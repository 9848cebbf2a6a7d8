"""Command-line surface: artifacts written and exit statuses"""
import json

import pytest

from main import main
from src.config import SUITE_CONFIG

SMALL_RUN = json.dumps({
    "schedule": [0.9], "seeds": [0], "sample_size": 100, "near_size": 20, "gh_points": 10,
})


def _only(root, name):
    found = sorted(root.rglob(name))
    assert len(found) == 1, found
    return found[0]


@pytest.fixture
def threads_file(tmp_path):
    assert main(['net', '--eps', '0.9', '--out', str(tmp_path / 'net')]) == 0
    net = _only(tmp_path / 'net', 'net.json')
    assert main(['threads', '--net', str(net), '--out', str(tmp_path / 'threads')]) == 0
    return _only(tmp_path / 'threads', 'threads.json')


@pytest.fixture(autouse=True)
def no_seed_override(monkeypatch):
    monkeypatch.delenv('FLATLAB_SEED', raising=False)


def test_query_same_point_is_zero(threads_file, tmp_path, capsys):
    code = main(['query', '--threads', str(threads_file), '--x', '1,0,0', '--y', '1,0,0',
                 '--out', str(tmp_path / 'q')])
    assert code == 0
    assert capsys.readouterr().out.strip().splitlines()[-1] == '0'
    assert _only(tmp_path / 'q', 'query.json')


def test_query_dumps_pairs(threads_file, tmp_path):
    assert main(['query', '--threads', str(threads_file), '--x', '1,0,0', '--y', '0,1,0',
                 '--dump-pairs', '--out', str(tmp_path / 'q')]) == 0
    assert _only(tmp_path / 'q', 'pairs.csv')


@pytest.mark.parametrize("x", ['1,1,0', '1,0', 'a,b,c', '1,0,0,0'])
def test_query_rejects_bad_points(threads_file, tmp_path, x):
    assert main(['query', '--threads', str(threads_file), '--x', x, '--y', '0,1,0',
                 '--out', str(tmp_path / 'q')]) == 2


def test_missing_input_file(tmp_path):
    assert main(['threads', '--net', str(tmp_path / 'absent.json'), '--out', str(tmp_path)]) == 2


def test_bad_arguments():
    assert main([]) == 2
    assert main(['net']) == 2


def test_profile_outputs(tmp_path):
    out = tmp_path / 'p'
    assert main(['profile', '--m', '2', '--rho0', '0.01', '--rho', '0.6', '--L', '2',
                 '--samples', '200', '--html', '--out', str(out)]) == 0
    doc = json.loads(_only(out, 'profile.json').read_text(encoding='utf-8'))
    assert doc['gluing_residual'] <= 1e-8
    assert doc['graph_length'] == pytest.approx(2.0, abs=1e-6)
    for name in ('profile.csv', 'profile_mesh.txt', 'profile.html'):
        assert _only(out, name)


def test_infeasible_profile(tmp_path):
    assert main(['profile', '--rho0', '0.01', '--rho', '0.1', '--L', '2', '--out', str(tmp_path)]) == 3


def test_budget_from_profile(tmp_path):
    assert main(['profile', '--m', '3', '--rho0', '0.02', '--rho', '0.6', '--L', '2',
                 '--samples', '200', '--out', str(tmp_path / 'p')]) == 0
    profile = _only(tmp_path / 'p', 'profile.json')
    assert main(['budget', '--profile', str(profile), '--out', str(tmp_path / 'b')]) == 0
    doc = json.loads(_only(tmp_path / 'b', 'budget.json').read_text(encoding='utf-8'))
    assert doc['mode'] == 'single'
    assert doc['total_dF'] > 0


def test_budget_with_imaginary_height(tmp_path, capsys):
    assert main(['profile', '--m', '3', '--rho0', '0.02', '--rho', '0.6', '--L', '2',
                 '--samples', '200', '--out', str(tmp_path / 'p')]) == 0
    profile = _only(tmp_path / 'p', 'profile.json')
    assert main(['budget', '--profile', str(profile), '--diam', '0.1', '--out', str(tmp_path / 'b')]) == 2
    assert 'imaginary' in capsys.readouterr().out


def test_budget_from_threads(threads_file, tmp_path):
    assert main(['budget', '--threads', str(threads_file), '--L-policy', 'min',
                 '--out', str(tmp_path / 'b')]) == 0
    doc = json.loads(_only(tmp_path / 'b', 'budget.json').read_text(encoding='utf-8'))
    assert doc['mode'] == 'iterated'
    assert doc['total_dF'] == pytest.approx(sum(step['dF_bound'] for step in doc['per_step']))


def test_budget_needs_an_input(tmp_path):
    assert main(['budget', '--out', str(tmp_path)]) == 2


def test_verify_and_report(tmp_path):
    runs = tmp_path / 'runs'
    assert main(['verify', '--override', SMALL_RUN, '--out', str(runs)]) == 0
    report = json.loads(_only(runs, 'report.json').read_text(encoding='utf-8'))
    assert report['breaches'] == []
    assert len(report['records']) == 1
    assert _only(runs, 'report.csv') and _only(runs, 'plot.csv')

    out = tmp_path / 'reports'
    assert main(['report', '--runs', str(runs), '--out', str(out)]) == 0
    for name in ('combined.csv', 'trend.csv', 'runs.csv', 'deviation.html', 'budget.html'):
        assert _only(out, name)


def test_verify_exits_4_on_breach(tmp_path, monkeypatch):
    monkeypatch.setitem(SUITE_CONFIG, 'twelve_eps_factor', 0.0)
    assert main(['verify', '--override', SMALL_RUN, '--out', str(tmp_path)]) == 4


def test_verify_uses_tolerance_override(tmp_path):
    override = json.dumps({**json.loads(SMALL_RUN), "tolerances": {"metric": -1.0}})
    assert main(['verify', '--override', override, '--out', str(tmp_path)]) == 4
    report = json.loads(_only(tmp_path, 'report.json').read_text(encoding='utf-8'))
    assert report['config']['tolerances']['metric'] == -1.0
    assert report['records'][0]['status'] == 'invalid'


def test_verify_bad_override(tmp_path):
    assert main(['verify', '--override', '{"schedule": [0.3, 0.9]}', '--out', str(tmp_path)]) == 2
