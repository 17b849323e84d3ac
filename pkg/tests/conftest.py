"""generic fixtures."""

from __future__ import annotations

import logging

import numpy as np
import pytest

from tgmixer.constants import SLOW_TESTS
from tgmixer.graph import EventLog, build_index, generate_periodic_dataset
from tgmixer.model import GraphMixerConfig


@pytest.fixture
def test_logger():
    """Provide a silent logger for tests."""
    logger = logging.getLogger("test")
    logger.handlers.clear()
    logger.addHandler(logging.NullHandler())
    logger.propagate = False
    return logger


# Error patterns to detect in stderr during tests
ERROR_PATTERNS = [
    "Traceback",
    "Unhandled exception",
]


def pytest_configure():
    """Runs once before all."""
    from tgmixer.logging_setup import init_logger

    init_logger("/dev/null", force_debug=True)


def pytest_collection_modifyitems(config, items):
    """Skip the long reproduction runs unless TGMIXER_SLOW is set."""
    if SLOW_TESTS:
        return
    skip = pytest.mark.skip(reason="set TGMIXER_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def _contains_error(text: str) -> str | None:
    """Check if text contains error patterns, returns the matching line or None."""
    for line in text.split("\n"):
        for pattern in ERROR_PATTERNS:
            if pattern in line:
                return line.strip()
    return None


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Check captured stderr for error patterns after each test."""
    outcome = yield
    report = outcome.get_result()

    if call.when == "call" and report.passed:
        for section_name, content in report.sections:
            if "stderr" in section_name.lower():
                error_line = _contains_error(content)
                if error_line:
                    report.outcome = "failed"
                    report.longrepr = f"Error detected in captured output:\n{error_line}"
                    return


# Graphs

# v1..v5 are ids 0..4; event n happens at time n
FIVE_NODE_EDGES = [
    (0, 1),  # t1: v1 - v2
    (2, 4),  # t2: v3 - v5
    (3, 1),  # t3: v4 - v2
    (1, 3),  # t4: v2 - v4
    (0, 1),  # t5: v1 - v2
    (4, 2),  # t6: v5 - v3
]


@pytest.fixture
def five_node_events() -> EventLog:
    """Six events over five nodes, one per unit of time."""
    src, dst = zip(*FIVE_NODE_EDGES, strict=True)
    return EventLog.from_arrays(list(src), list(dst), np.arange(1.0, 7.0), num_nodes=5)


@pytest.fixture
def five_node_graph(five_node_events):
    """Undirected index of `five_node_events`."""
    return build_index(five_node_events, undirected=True)


@pytest.fixture
def small_events() -> EventLog:
    """60 periodic events over 6 users and 4 items, d_link = 2."""
    return generate_periodic_dataset(num_users=6, num_items=4, num_events=60, d_link=2, seed=3, min_period=2.0, max_period=8.0)


@pytest.fixture
def small_graph(small_events):
    """Undirected index of `small_events`."""
    return build_index(small_events, undirected=True)


@pytest.fixture
def tiny_config() -> GraphMixerConfig:
    """Small widths for fast forward/backward tests."""
    return GraphMixerConfig(k=4, window=10.0, d_time=8, d_hidden=6)
