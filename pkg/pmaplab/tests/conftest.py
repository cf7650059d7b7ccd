from __future__ import annotations

from typing import Callable

import pytest  # type: ignore

from pmaplab.config import Settings, load_settings
from pmaplab.field import FieldSpec, default_field
from pmaplab.matrix import ExactMatrix
from pmaplab.services.generators import gen_random_dense, order_gap_counterexample
from pmaplab.services.reconstructor import verify_property_R
from pmaplab.utils import SeededStream, seeded_stream


@pytest.fixture(autouse=True)
def _single_thread_env(monkeypatch) -> None:
    monkeypatch.setenv("PMAPLAB_THREADS", "1")
    monkeypatch.setenv("PMAPLAB_LOG_LEVEL", "WARNING")
    monkeypatch.delenv("SENTRY_DSN", raising=False)


@pytest.fixture
def settings() -> Settings:
    return load_settings(dotenv=False)


@pytest.fixture
def stream() -> SeededStream:
    return seeded_stream(20240611, "tests")


@pytest.fixture
def f101() -> FieldSpec:
    return FieldSpec.prime(101)


@pytest.fixture
def rationals() -> FieldSpec:
    return FieldSpec.rational()


@pytest.fixture
def dense_factory(stream) -> Callable[[int], ExactMatrix]:
    """Seeded dense matrices over choose_prime(n) that also have the rank-one extension property."""

    def make(n: int) -> ExactMatrix:
        field = default_field(n)
        while True:
            candidate = gen_random_dense(n, field, stream)
            if verify_property_R(candidate):
                return candidate

    return make


@pytest.fixture
def counterexample_pair() -> tuple[ExactMatrix, ExactMatrix]:
    return order_gap_counterexample(6, default_field(6))


def pytest_configure(config) -> None:
    config.addinivalue_line("markers", "slow: long sweeps, run with PMAPLAB_SLOW_TESTS=1")
