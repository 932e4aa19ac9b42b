"""Shared fixtures and hypothesis configuration."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qdlab.hilbert import derive_rng

MASTER_SEED = 20260825

settings.register_profile(
    "qdlab",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("qdlab")


@pytest.fixture
def rng(request) -> np.random.Generator:
    """Generator derived from the test's own node id, so every test is
    reproducible in isolation and insensitive to collection order."""
    return derive_rng(MASTER_SEED, request.node.nodeid)


@pytest.fixture
def announce(request):
    """Write one line straight to the terminal, bypassing pytest capture.

    Used by the acceptance tests so each criterion prints a visible
    pass/fail line even when the test itself passes.
    """
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def _write(line: str) -> None:
        if reporter is not None:
            reporter.ensure_newline()
            reporter.write_line(line)

    return _write
