"""Shared test helpers: seeded generators and the acceptance report."""

from __future__ import annotations

import numpy as np

# Acceptance criteria results, echoed in the terminal summary so every run
# of `pytest -v` ends with one PASS/FAIL line per criterion.
CRITERION_LINES: list = []


def record_criterion(num: int, passed: bool, detail: str) -> None:
    line = f"CRITERION {num:2d}: {'PASS' if passed else 'FAIL'} - {detail}"
    CRITERION_LINES.append(line)
    print(line)
    assert passed, line


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERION_LINES):
            terminalreporter.write_line(line)


def rng_of(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed)))
