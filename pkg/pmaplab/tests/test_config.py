from __future__ import annotations

import json
import logging

import pytest

from pmaplab.config import load_settings
from pmaplab.errors import InvalidInput
from pmaplab.extensions import init_error_reporting, parallel_map
from pmaplab.utils import correlation_id, read_json, run_context, seeded_stream, structured_log, write_json


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("PMAPLAB_THREADS", "4")
    monkeypatch.setenv("PMAPLAB_LOG_LEVEL", "debug")
    monkeypatch.setenv("PMAPLAB_ISOLATION_RETRIES", "32")
    settings = load_settings(dotenv=False)
    assert settings.threads == 4
    assert settings.log_level == "DEBUG"
    assert settings.isolation_retries == 32
    assert settings.to_dict()["sentry_enabled"] is False


@pytest.mark.parametrize("raw", ["abc", "0", "-3"])
def test_invalid_values_fall_back(monkeypatch, raw):
    monkeypatch.setenv("PMAPLAB_PMAP_RETRIES", raw)
    monkeypatch.setenv("PMAPLAB_VERIFY_POINTS", raw)
    settings = load_settings(dotenv=False)
    assert settings.pmap_retries == 8
    assert settings.verify_points == 8


def test_error_reporting_stays_off_without_dsn(settings):
    assert init_error_reporting(settings) is False


def test_log_entries_carry_the_run_correlation_id(caplog):
    with caplog.at_level(logging.INFO, logger="pmaplab.observability"):
        with run_context("run-42") as cid:
            structured_log("test.event", value=3)
            assert correlation_id() == cid
    entry = json.loads(caplog.records[-1].getMessage())
    assert entry == {"event": "test.event", "correlation_id": "run-42", "value": 3}
    assert correlation_id() != "run-42"


def test_parallel_map_keeps_order_and_correlation_id():
    with run_context("pool"):
        results = parallel_map(lambda x: (x * x, correlation_id()), range(10), threads=3)
    assert [value for value, _ in results] == [x * x for x in range(10)]
    assert {cid for _, cid in results} == {"pool"}


def test_seeded_streams_are_reproducible_and_independent():
    big = 10**40
    assert seeded_stream(5, "shift").below(big) == seeded_stream(5, "shift").below(big)
    parent = seeded_stream(5)
    untouched = parent.stream("child").below(1000)
    for _ in range(20):
        parent.below(1000)
    assert parent.stream("child").below(1000) == untouched
    assert sorted(parent.shuffled(range(6))) == list(range(6))


def test_json_io(tmp_path):
    target = tmp_path / "nested" / "out.json"
    write_json({"b": 1, "a": [1, 2]}, target)
    assert target.read_text(encoding="utf-8").startswith('{\n  "a"')
    assert read_json(target) == {"a": [1, 2], "b": 1}
    with pytest.raises(InvalidInput):
        read_json(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(InvalidInput) as excinfo:
        read_json(broken)
    assert "line" in excinfo.value.context


def test_error_payload_is_json_ready():
    exc = InvalidInput("bad subset", subset={3, 1}, n=2)
    assert exc.to_dict() == {
        "error": "InvalidInput",
        "message": "bad subset",
        "context": {"subset": [1, 3], "n": 2},
    }
    assert isinstance(exc, RuntimeError)
