"""Artifact codecs, the run directory and bit-faithful float output"""
import json
import math

import numpy as np
import pytest

from src.config import SCHEMAS
from src.convergence import ConvergenceRecord, ConvergenceReport
from src.errors import SchemaError, ValidationError
from src.filling import filling_budget, iterated_budget
from src.geometry import ThreadSystem, check_thread_system
from src.geometry.sphere import sphere_volume
from src.tunnel import generate_profile
from src.utils.artifacts import (
    ArtifactStore,
    decode_budget,
    decode_net,
    decode_profile,
    decode_report,
    decode_threads,
    dumps,
    encode_budget,
    encode_net,
    encode_profile,
    encode_report,
    encode_threads,
    load_artifact,
)


@pytest.fixture
def store(tmp_path):
    return ArtifactStore(tmp_path, run_id="run")


def _reload(store, name, doc):
    return load_artifact(store.write(name, doc), doc['schema'])


def test_floats_reload_bit_for_bit(rng):
    values = list(rng.standard_normal(200) * 10.0 ** rng.integers(-12, 12, 200))
    values += [1.0, 0.1, 1e-300, 2.0 ** 60, -0.0]
    back = json.loads(dumps({'values': values}))['values']
    assert back == values
    assert '"x": 1.0' in dumps({'x': 1.0})


def test_non_finite_floats():
    back = json.loads(dumps({'a': math.nan, 'b': math.inf, 'c': -math.inf}))
    assert math.isnan(back['a']) and back['b'] == math.inf and back['c'] == -math.inf


def test_net_round_trip(store, net_05):
    net = decode_net(_reload(store, "net.json", encode_net(net_05)))
    np.testing.assert_array_equal(net.centers, net_05.centers)
    assert (net.eps, net.seed, net.count) == (net_05.eps, net_05.seed, net_05.count)


def test_threads_round_trip(store, threads_05):
    system = decode_threads(_reload(store, "threads.json", encode_threads(threads_05)))
    assert system.pairs == threads_05.pairs
    np.testing.assert_array_equal(system.length_array(), threads_05.length_array())
    np.testing.assert_array_equal(system.endpoint_array(), threads_05.endpoint_array())
    assert system.rho == threads_05.rho
    assert check_thread_system(system) == []


def test_segment_threads_round_trip(store):
    e = np.eye(3)
    segments = ThreadSystem.from_segments([(e[0], e[1]), (e[2], -e[0])], eps=0.5, rho=0.01)
    system = decode_threads(_reload(store, "threads.json", encode_threads(segments)))
    assert system.endpoint_set is None
    assert system.pairs == segments.pairs


def test_threads_with_wrong_length_are_rejected(threads_05):
    doc = encode_threads(threads_05)
    doc['pairs'][0][2] += 1e-6
    with pytest.raises(SchemaError):
        decode_threads(doc)


def test_profile_round_trip(store):
    profile = generate_profile(3, 0.02, 0.6, 2.5, samples=300)
    back = decode_profile(_reload(store, "profile.json", encode_profile(profile)))
    assert back.L_prime == profile.L_prime
    np.testing.assert_array_equal(back.r, profile.r)


def test_single_budget_round_trip(store):
    profile = generate_profile(2, 0.02, 0.6, 2.0)
    budget = filling_budget(profile, sphere_volume(2), math.pi)
    assert decode_budget(_reload(store, "budget.json", encode_budget(budget))) == budget


def test_iterated_budget_round_trip(store):
    e = np.eye(3)
    system = ThreadSystem.from_segments([(e[0], -e[0]), (e[1], -e[1])], eps=0.5, rho=0.6)
    budget = iterated_budget(system)
    back = decode_budget(_reload(store, "budget.json", encode_budget(budget)))
    assert back == budget


def test_report_round_trip(store):
    record = ConvergenceRecord(eps=0.5, seed=0, N=7, K=21, rho=0.5 / 49, sup_deviation=0.4,
                               min_ratio=1.0, max_ratio=1.3, gh_estimate=0.1, status='ok')
    report = ConvergenceReport(2, [0.5], [0], 100, [record])
    doc = _reload(store, "report.json", encode_report(report, {'trend_ok': True}))
    assert doc['trend_ok'] is True
    back = decode_report(doc)
    assert repr(back.per_eps[0]) == repr(record)
    assert back.schedule == [0.5]


def test_store_creates_unique_run_dirs(tmp_path, net_05):
    first = ArtifactStore(tmp_path, run_id="same")
    second = ArtifactStore(tmp_path, run_id="same")
    a = first.write("net.json", encode_net(net_05))
    b = second.write("net.json", encode_net(net_05))
    assert a.parent != b.parent
    assert b.parent.name == "same-1"


def test_artifacts_are_deterministic(tmp_path, net_05):
    docs = []
    for run in ("a", "b"):
        doc = load_artifact(ArtifactStore(tmp_path, run_id=run).write("net.json", encode_net(net_05)))
        doc.pop('created')
        docs.append(doc)
    assert docs[0] == docs[1]


def test_load_errors(tmp_path, store, net_05):
    with pytest.raises(ValidationError):
        load_artifact(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError):
        load_artifact(bad)
    path = store.write("net.json", encode_net(net_05))
    with pytest.raises(SchemaError):
        load_artifact(path, SCHEMAS['threads'])
    with pytest.raises(SchemaError):
        decode_threads(load_artifact(path))


def test_unknown_schema_is_not_written(store):
    with pytest.raises(SchemaError):
        store.write("x.json", {'schema': 'mystery/9'})
