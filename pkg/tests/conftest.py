import numpy as np
import pytest
from hypothesis import settings

from ucpbench.dataset import Dataset, ProjectRecord
from ucpbench.size import EnvironmentalFactors

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def make_dataset(env_rows, ucp, effort, name="t"):
    recs = tuple(
        ProjectRecord(f"p{i:03d}", EnvironmentalFactors(tuple(int(v) for v in e)), float(u), float(f))
        for i, (e, u, f) in enumerate(zip(env_rows, ucp, effort))
    )
    return Dataset(name, recs)


def data_from_productivity(env_rows, productivity, ucp=100.0, name="t"):
    env_rows = np.asarray(env_rows)
    u = np.broadcast_to(np.asarray(ucp, dtype=float), (len(env_rows),))
    return make_dataset(env_rows, u, np.asarray(productivity) * u, name)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_dataset(rng):
    env = rng.integers(0, 6, size=(30, 8))
    prod = 30 - 1.5 * env[:, 0] + rng.normal(0, 1, 30)
    return data_from_productivity(env, np.clip(prod, 5, 40), ucp=rng.uniform(50, 300, 30))


M4_PAIRS = [(30, 26), (18, 14), (28, 24), (20, 16), (24, 24), (20, 20)]


def m4_hand_rows():
    """Six mutual-nearest pairs: training mean 22, LOO 1-NN correlation 0.75,
    nearest neighbour of ``5*e_0`` has productivity 30."""
    rows = []
    for k, (a, b) in enumerate(M4_PAIRS):
        e = [0] * 8
        e[k] = 5
        f = list(e)
        f[6] = 1
        rows.append((e, a))
        rows.append((f, b))
    return rows


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
