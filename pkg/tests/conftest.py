"""Shared fixtures: full-scale throughput traces are expensive, so build each once."""
from functools import lru_cache

import pytest

from jadelab.engine import run
from jadelab.presets import get_preset

ACCEPTANCE_SEEDS = (1, 2, 3, 4, 5)
_results: list[tuple[str, bool, str]] = []


@lru_cache(maxsize=None)
def regime_trace(seed: int):
    cfg = get_preset("fig-throughput-uniform").config
    return run(cfg.replace(seed=seed))


@pytest.fixture(scope="session")
def regime_traces():
    return {s: regime_trace(s) for s in ACCEPTANCE_SEEDS}


@pytest.fixture
def record():
    """Register one acceptance line; asserts after recording it."""
    def _record(label: str, ok: bool, detail: str) -> None:
        _results.append((label, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
        assert ok, f"{label}: {detail}"
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _results:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
