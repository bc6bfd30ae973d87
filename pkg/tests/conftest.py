import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from measgeom.cliffords import GATES, SINGLE_QUBIT_CLIFFORDS  # noqa: E402
from measgeom.stabilizer import apply_clifford, new_product_state  # noqa: E402


def random_clifford_state(n, rng, n_gates=None, record=None):
    """Random stabilizer state from a random circuit of 1q Cliffords, SWAP, ISWAP, CNOT."""
    st = new_product_state(n)
    n_gates = 4 * n * n if n_gates is None else n_gates
    two = ["SWAP", "ISWAP", "CNOT", "CZ"]
    for _ in range(n_gates):
        if n > 1 and rng.random() < 0.5:
            a, b = rng.choice(n, size=2, replace=False)
            g = GATES[two[rng.integers(len(two))]]
            t = [int(a), int(b)]
        else:
            g = SINGLE_QUBIT_CLIFFORDS[rng.integers(24)]
            t = [int(rng.integers(n))]
        apply_clifford(st, g, t)
        if record is not None:
            record.append((g, t))
    return st


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
