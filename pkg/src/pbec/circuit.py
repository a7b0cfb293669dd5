"""Gate-level circuit IR.

A :class:`Circuit` is an immutable, ordered gate list; the first gate in the
list is applied first.  Qubit 0 is the most significant bit of a basis index.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .wbdd import DDManager, Edge

_SQRT1_2 = math.sqrt(0.5)
_T_PHASE = complex(_SQRT1_2, _SQRT1_2)


class CircuitError(ValueError):
    pass


class GateKind(str, Enum):
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    X = "x"
    Y = "y"
    Z = "z"
    SX = "sx"
    SXDG = "sxdg"
    RZ = "rz"
    RX = "rx"
    RY = "ry"
    U1 = "u1"
    CX = "cx"
    CZ = "cz"
    SWAP = "swap"

    @property
    def arity(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def parametric(self) -> bool:
        return self in _PARAMETRIC

    def __str__(self) -> str:
        return self.value


_TWO_QUBIT = frozenset({GateKind.CX, GateKind.CZ, GateKind.SWAP})
_PARAMETRIC = frozenset({GateKind.RZ, GateKind.RX, GateKind.RY, GateKind.U1})
DIAGONAL_PHASE_KINDS = frozenset(
    {GateKind.RZ, GateKind.U1, GateKind.T, GateKind.TDG, GateKind.S, GateKind.SDG}
)

_INVERSE = {
    GateKind.S: GateKind.SDG,
    GateKind.SDG: GateKind.S,
    GateKind.T: GateKind.TDG,
    GateKind.TDG: GateKind.T,
    GateKind.SX: GateKind.SXDG,
    GateKind.SXDG: GateKind.SX,
}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self) -> None:
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if len(qubits) != kind.arity:
            raise CircuitError(f"{kind} acts on {kind.arity} qubit(s), got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"{kind} qubits must be distinct, got {qubits}")
        if any(q < 0 for q in qubits):
            raise CircuitError(f"negative qubit index in {qubits}")
        if kind.parametric:
            if self.angle is None or not math.isfinite(self.angle):
                raise CircuitError(f"{kind} needs one finite angle, got {self.angle!r}")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise CircuitError(f"{kind} takes no angle")

    def inverse(self) -> Gate:
        if self.kind.parametric:
            return Gate(self.kind, self.qubits, -self.angle)
        return Gate(_INVERSE.get(self.kind, self.kind), self.qubits)

    def matrix(self) -> np.ndarray:
        return gate_matrix(self.kind, self.angle)

    def __str__(self) -> str:
        args = ",".join(str(q) for q in self.qubits)
        if self.kind.parametric:
            return f"{self.kind}({self.angle!r})[{args}]"
        return f"{self.kind}[{args}]"


def gate(name: str | GateKind, *qubits: int, angle: float | None = None) -> Gate:
    """Shorthand constructor: ``gate("cx", 0, 1)``, ``gate("rz", 2, angle=0.1)``."""
    return Gate(GateKind(name), tuple(qubits), angle)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.n_qubits < 0:
            raise CircuitError("n_qubits must be non-negative")
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        for g in gates:
            if not isinstance(g, Gate):
                raise CircuitError(f"not a gate: {g!r}")
            if max(g.qubits) >= self.n_qubits:
                raise CircuitError(f"{g} out of range for {self.n_qubits} qubits")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        return concat(self, other)

    @property
    def depth(self) -> int:
        return len(layers(self))

    def with_gates(self, gates: Iterable[Gate]) -> Circuit:
        return Circuit(self.n_qubits, tuple(gates))


def layers(c: Circuit) -> list[list[int]]:
    """Greedy ASAP layering; each entry lists the gate indices of one layer."""
    free_at = [0] * c.n_qubits
    out: list[list[int]] = []
    for i, g in enumerate(c.gates):
        k = max(free_at[q] for q in g.qubits)
        if k == len(out):
            out.append([])
        out[k].append(i)
        for q in g.qubits:
            free_at[q] = k + 1
    return out


def adjoint_circuit(c: Circuit) -> Circuit:
    return Circuit(c.n_qubits, tuple(g.inverse() for g in reversed(c.gates)))


def support(g: Gate) -> frozenset[int]:
    return frozenset(g.qubits)


def concat(a: Circuit, b: Circuit) -> Circuit:
    if a.n_qubits != b.n_qubits:
        raise CircuitError(f"width mismatch: {a.n_qubits} vs {b.n_qubits}")
    return Circuit(a.n_qubits, a.gates + b.gates)


def gate_matrix(kind: GateKind | str, angle: float | None = None) -> np.ndarray:
    """Dense unitary; for two-qubit kinds the first listed qubit is the high bit."""
    kind = GateKind(kind)
    if kind is GateKind.H:
        return np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2
    if kind is GateKind.S:
        return np.diag([1, 1j])
    if kind is GateKind.SDG:
        return np.diag([1, -1j])
    if kind is GateKind.T:
        return np.diag([1, _T_PHASE])
    if kind is GateKind.TDG:
        return np.diag([1, _T_PHASE.conjugate()])
    if kind is GateKind.X:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind is GateKind.Y:
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if kind is GateKind.Z:
        return np.diag([1, -1]).astype(complex)
    if kind is GateKind.SX:
        return 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
    if kind is GateKind.SXDG:
        return 0.5 * np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]])
    if kind is GateKind.RZ:
        return np.diag([cmath.exp(-0.5j * angle), cmath.exp(0.5j * angle)])
    if kind is GateKind.RX:
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.U1:
        return np.diag([1, cmath.exp(1j * angle)])
    if kind is GateKind.CX:
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = [[0, 1], [1, 0]]
        return m
    if kind is GateKind.CZ:
        return np.diag([1, 1, 1, -1]).astype(complex)
    if kind is GateKind.SWAP:
        return np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    raise CircuitError(f"no matrix for {kind}")


def gate_unitary(g: Gate, manager: DDManager) -> Edge:
    """The gate's own 2x2 or 4x4 unitary as a diagram (``g.qubits[0]`` on top)."""
    return manager.from_dense(g.matrix())


def circuit_unitary(c: Circuit, manager: DDManager) -> Edge:
    """Full ``2^n x 2^n`` unitary as a diagram, built gate by gate."""
    u = manager.identity(c.n_qubits)
    for g in c.gates:
        u = manager.mul(manager.embed(g.matrix(), g.qubits, c.n_qubits), u)
    return u


def random_circuit(n_qubits: int, n_gates: int, rng, kinds: Sequence[GateKind] | None = None) -> Circuit:
    """Unstructured random circuit over ``kinds`` with arbitrary qubit pairs.

    ``rng`` is a :class:`random.Random`-like object.  Used for property tests
    where the layered generator's nearest-neighbour structure is too narrow.
    """
    if kinds is None:
        kinds = list(GateKind)
    kinds = [k for k in kinds if n_qubits >= 2 or GateKind(k).arity == 1]
    gates = []
    for _ in range(n_gates):
        kind = GateKind(rng.choice(kinds))
        qubits = tuple(rng.sample(range(n_qubits), kind.arity))
        angle = rng.uniform(-math.pi, math.pi) if kind.parametric else None
        gates.append(Gate(kind, qubits, angle))
    return Circuit(n_qubits, tuple(gates))
