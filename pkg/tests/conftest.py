import numpy as np
import pytest

from driftlab.streams import StreamConfig, generate_stream


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def small_stream():
    """20 chunks of 200 rows, 10% minority, sudden drifts."""
    cfg = StreamConfig(n_chunks=20, chunk_size=200, minority_ratio=0.10, seed=11)
    return generate_stream(cfg)


def blobs(rng, n=200, d=4, sep=3.0, pos_frac=0.3):
    """Two Gaussian blobs; label 1 centred at +sep/2, label 0 at -sep/2."""
    y = (rng.random(n) < pos_frac).astype(np.int64)
    X = rng.standard_normal((n, d)) + np.where(y[:, None] == 1, sep / 2, -sep / 2)
    return X, y


_criteria = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rpartition("::")[2]
    if "test_acceptance.py" in report.nodeid and name.startswith("test_c"):
        if report.when == "call" or report.failed or report.skipped:
            prev = _criteria.get(name)
            if prev is None or prev[0] == "PASS":
                _criteria[name] = ("PASS" if report.passed else "FAIL" if report.failed else "SKIP",
                                   report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        outcome, seconds = _criteria[name]
        num, _, label = name[len("test_c"):].partition("_")
        terminalreporter.write_line(f"criterion {int(num):>2}  {outcome:<4}  {label.replace('_', ' ')}  ({seconds:.1f}s)")
