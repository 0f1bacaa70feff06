"""Shared signatures for the test suite."""

from __future__ import annotations

import pytest

from cmonrw.sigterm import Signature, parse_signature


@pytest.fixture(scope="session")
def sig() -> Signature:
    return parse_signature(
        "gen a : 1 -> 1\n"
        "gen b : 1 -> 1\n"
        "gen f : 2 -> 1\n"
        "gen g : 1 -> 2\n"
    )


@pytest.fixture(scope="session")
def unary_sig() -> Signature:
    return parse_signature(
        "gen f : 1 -> 1\ngen g : 1 -> 1\ngen h : 2 -> 1\ngen s : 0 -> 1\n"
    )


def pytest_terminal_summary(terminalreporter):
    from _acceptance_registry import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
