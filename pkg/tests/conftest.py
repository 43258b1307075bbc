import numpy as np
import pytest

from metricqm.metric import MetricOperator

_ACCEPTANCE: list[tuple[int, str, bool]] = []


@pytest.fixture
def record_criterion():
    """Register one acceptance line; printed in the terminal summary."""

    def record(number: int, text: str, passed: bool) -> None:
        _ACCEPTANCE.append((number, text, passed))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, text, passed in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {text}")


def random_hermitian(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (x + x.conj().T)


def random_psd(rng, d, rank=None):
    x = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    return x @ x.conj().T


def random_metric(rng, d, floor=0.1):
    return MetricOperator(random_psd(rng, d) + floor * np.eye(d))


def random_unitary(rng, d):
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_vector(rng, d):
    return rng.normal(size=d) + 1j * rng.normal(size=d)
