import os
from pathlib import Path

import pytest

from milc.harness.data import default_mnist_dir, mnist_paths

ACCEPTANCE_LINES = []


def _find_mnist():
    candidates = [default_mnist_dir()]
    if os.environ.get("MILC_MNIST_DIR"):
        candidates.insert(0, Path(os.environ["MILC_MNIST_DIR"]))
    for root in candidates:
        try:
            mnist_paths(root)
            return root
        except FileNotFoundError:
            continue
    return None


@pytest.fixture(scope="session")
def mnist_dir():
    root = _find_mnist()
    if root is None:
        pytest.skip("MNIST IDX files not found (set MILC_DATA_DIR or MILC_MNIST_DIR)")
    return root


@pytest.fixture
def record_criterion():
    """Log one acceptance line; printed in the terminal summary."""

    def record(number, name, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"[{status}] criterion {number:>2}: {name} {detail}".rstrip())
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
