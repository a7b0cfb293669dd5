"""Dense brute-force reference: full unitaries and ground-truth equivalence.

Deliberately naive.  Nothing here touches the decision-diagram kernel, so it
can serve as an independent check on it.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, CircuitError, Gate

MAX_QUBITS = 12
DEFAULT_TOLERANCE = 1e-9


def _check_width(n: int) -> None:
    if n > MAX_QUBITS:
        raise CircuitError(f"dense oracle limited to {MAX_QUBITS} qubits, got {n}")


def apply_gate(state: np.ndarray, g: Gate, n: int) -> np.ndarray:
    """Left-multiply ``state`` (shape ``(2^n, ...)``) by gate ``g`` embedded in n qubits."""
    k = len(g.qubits)
    rest = state.shape[1:]
    t = state.reshape((2,) * n + rest)
    t = np.moveaxis(t, list(g.qubits), list(range(k)))
    shape = t.shape
    t = g.matrix() @ t.reshape(2 ** k, -1)
    t = np.moveaxis(t.reshape(shape), list(range(k)), list(g.qubits))
    return t.reshape(state.shape)


def dense_unitary(c: Circuit) -> np.ndarray:
    _check_width(c.n_qubits)
    dim = 2 ** c.n_qubits
    u = np.eye(dim, dtype=complex)
    for g in c.gates:
        u = apply_gate(u, g, c.n_qubits)
    return u


def dense_state(c: Circuit) -> np.ndarray:
    """``C|0...0>`` as a dense vector."""
    _check_width(c.n_qubits)
    psi = np.zeros(2 ** c.n_qubits, dtype=complex)
    psi[0] = 1
    for g in c.gates:
        psi = apply_gate(psi, g, c.n_qubits)
    return psi


def proportional_to_identity(m: np.ndarray, tol: float) -> bool:
    diag = np.diag(m)
    off = m - np.diag(diag)
    if off.size and np.abs(off).max() > tol:
        return False
    return bool(np.abs(diag - diag[0]).max() <= tol)


def oracle_equivalent(c0: Circuit, c1: Circuit, tol: float = DEFAULT_TOLERANCE) -> bool:
    """True iff ``U1^dagger U0`` is a global phase times the identity, entrywise within ``tol``."""
    if c0.n_qubits != c1.n_qubits:
        raise CircuitError(f"width mismatch: {c0.n_qubits} vs {c1.n_qubits}")
    _check_width(c0.n_qubits)
    m = dense_unitary(c1).conj().T @ dense_unitary(c0)
    return proportional_to_identity(m, tol)
