import numpy as np
import pytest

from qudit_compress.circuit import Circuit, Gate

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}

ENTANGLERS = ("CZ", "CNOT", "CT", "CTdag")


def random_circuit(rng: np.random.Generator, n: int, n_gates: int, kinds=ENTANGLERS, local_kinds=()) -> Circuit:
    gates = []
    for _ in range(n_gates):
        if local_kinds and rng.random() < 0.3:
            gates.append(Gate(str(rng.choice(local_kinds)), (int(rng.integers(n)),)))
            continue
        a, b = rng.choice(n, size=2, replace=False)
        gates.append(Gate(str(rng.choice(kinds)), (int(a), int(b))))
    return Circuit.qubits(n, gates)


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[0][2:])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
