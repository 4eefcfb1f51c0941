import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rfcbf.preprocess import DiscreteDataset, RawDataset  # noqa: E402

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def redundancy_dataset(m=2000, seed=0):
    """F0 predicts the class (80% agreement), F1 is an exact copy of F0 and
    F2 is independent noise."""
    r = np.random.default_rng(seed)
    y = r.integers(0, 2, m)
    f0 = np.where(r.random(m) < 0.8, y, 1 - y)
    f2 = r.integers(0, 2, m)
    return DiscreteDataset.from_arrays(np.column_stack([f0, f0, f2]), y)


def random_discrete(r, m, n, max_card=4, n_classes=None):
    k = n_classes or int(r.integers(2, 4))
    y = r.integers(0, k, m)
    cols = []
    for _ in range(n):
        kind = r.integers(0, 3)
        card = int(r.integers(1, max_card + 1))
        if kind == 0 or card == 1:
            cols.append(r.integers(0, card, m))
        elif kind == 1:
            noisy = np.where(r.random(m) < r.uniform(0.4, 0.95), y, r.integers(0, k, m))
            cols.append(noisy % card)
        else:
            cols.append(cols[-1] if cols else y % card)
    return DiscreteDataset.from_arrays(np.column_stack(cols), y)


def gaussian_raw(m=200, n_informative=2, n_noise=3, shift=3.0, seed=0):
    r = np.random.default_rng(seed)
    y = np.arange(m) % 2
    inf = r.normal(size=(m, n_informative)) + shift * y[:, None]
    noise = r.normal(size=(m, n_noise))
    return RawDataset(np.hstack([inf, noise]), y)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
