import random

import numpy as np
import pytest

from pbec.circuit import Circuit, Gate


def embed_dense(g: Gate, n: int) -> np.ndarray:
    """Brute-force embedding by enumerating basis indices (qubit 0 = MSB)."""
    dim = 2 ** n
    k = len(g.qubits)
    mat = g.matrix()
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub = 0
        for q in g.qubits:
            sub = 2 * sub + bits[q]
        for r in range(2 ** k):
            out = list(bits)
            for j, q in enumerate(g.qubits):
                out[q] = (r >> (k - 1 - j)) & 1
            row = int("".join(map(str, out)), 2)
            full[row, col] += mat[r, sub]
    return full


def brute_unitary(c: Circuit) -> np.ndarray:
    u = np.eye(2 ** c.n_qubits, dtype=complex)
    for g in c.gates:
        u = embed_dense(g, c.n_qubits) @ u
    return u


def pauli_on(p: np.ndarray, qubit: int, support) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for q in support:
        out = np.kron(out, p if q == qubit else np.eye(2))
    return out


@pytest.fixture
def rng():
    return random.Random(20261015)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
