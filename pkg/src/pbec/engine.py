"""Projection-based equivalence checking by Heisenberg propagation.

Two circuits ``C0`` and ``C1`` on ``n`` qubits are equivalent up to global
phase iff the miter ``D = C1^dagger C0`` commutes with every single-qubit
``X_i`` and ``Z_i`` (those 2n operators generate the full matrix algebra, so
only multiples of the identity commute with all of them).  Each check
conjugates one seed Pauli through ``D`` gate by gate, keeping the operator on
the smallest qubit support the gates have touched so far.

The same propagation applied to ``|0><0|_i`` through a single circuit gives
local projectors that stabilize the circuit's output state; those are the
circuit's fingerprint.
"""

from __future__ import annotations

import enum
import time
from bisect import bisect_left
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circuit import Circuit, CircuitError, Gate, adjoint_circuit, concat
from .wbdd import DDManager, Edge

DEFAULT_TOLERANCE = 1e-15
DEFAULT_KERNEL_TOLERANCE = 1e-15

PAULI_Z = np.diag([1, -1]).astype(complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PROJ_ZERO = np.diag([1, 0]).astype(complex)
SEEDS = {"Z": PAULI_Z, "X": PAULI_X}


class Outcome(str, enum.Enum):
    EQUIVALENT = "Equivalent"
    INEQUIVALENT = "Inequivalent"
    RESOURCE_LIMIT = "ResourceLimit"


class ResourceLimit(Exception):
    """Propagation exceeded its support, node or time budget."""

    def __init__(self, reason: str, peak_support: int = 0, peak_nodes: int = 0) -> None:
        super().__init__(reason)
        self.reason = reason
        self.peak_support = peak_support
        self.peak_nodes = peak_nodes


@dataclass(frozen=True)
class Budget:
    max_support: int | None = None  # None: the circuit width
    max_nodes: int = 1 << 22
    timeout_s: float | None = 100.0

    @classmethod
    def unlimited(cls) -> Budget:
        return cls(max_support=None, max_nodes=1 << 62, timeout_s=None)


@dataclass(frozen=True)
class LocalOperator:
    support: tuple[int, ...]
    mat: Edge

    def __post_init__(self) -> None:
        s = tuple(self.support)
        if list(s) != sorted(set(s)):
            raise ValueError(f"support must be sorted and duplicate-free: {s}")
        object.__setattr__(self, "support", s)
        h = self.mat.node.height
        if self.mat.weight != 0 and h != len(s):
            raise ValueError(f"matrix has {h} levels for a support of {len(s)}")

    @property
    def width(self) -> int:
        return len(self.support)

    def dense(self, manager: DDManager) -> np.ndarray:
        return manager.to_dense(self.mat, levels=len(self.support), matrix=True)


def local_operator(manager: DDManager, matrix, qubit: int) -> LocalOperator:
    return LocalOperator((qubit,), manager.from_dense(matrix))


def extend(op: LocalOperator, qubits: Sequence[int], manager: DDManager) -> LocalOperator:
    """Widen ``op`` with identity on any of ``qubits`` outside its support."""
    new = sorted(set(qubits).difference(op.support))
    if not new:
        return op
    support = sorted(set(op.support).union(new))
    mat = op.mat
    for q in new:
        mat = manager.insert_identity(mat, support.index(q))
    return LocalOperator(tuple(support), mat)


def embed_on(op: LocalOperator, matrix, qubit: int, manager: DDManager) -> Edge:
    """``matrix`` on ``qubit`` tensored with identity over ``op``'s support."""
    return manager.embed(matrix, [op.support.index(qubit)], op.width)


def miter(c0: Circuit, c1: Circuit) -> Circuit:
    """``C1^dagger`` applied after ``C0``; proportional to identity iff equivalent."""
    if c0.n_qubits != c1.n_qubits:
        raise CircuitError(f"width mismatch: {c0.n_qubits} vs {c1.n_qubits}")
    return concat(c0, adjoint_circuit(c1))


class Propagator:
    """Conjugates local operators through gates inside one manager.

    Embedded gate diagrams are cached per (gate, positions, width).
    """

    def __init__(self, manager: DDManager) -> None:
        self.manager = manager
        self._gates: dict[tuple, tuple[Edge, Edge]] = {}

    def gate_pair(self, g: Gate, positions: tuple[int, ...], width: int) -> tuple[Edge, Edge]:
        key = (g.kind, g.angle, positions, width)
        pair = self._gates.get(key)
        if pair is None:
            m = g.matrix()
            u = self.manager.embed(m, positions, width)
            pair = (u, self.manager.embed(m.conj().T, positions, width))
            self._gates[key] = pair
        return pair

    def conjugate(self, op: LocalOperator, g: Gate) -> LocalOperator:
        support = op.support
        if not any(q in support for q in g.qubits):
            return op
        op = extend(op, g.qubits, self.manager)
        positions = tuple(bisect_left(op.support, q) for q in g.qubits)
        u, ud = self.gate_pair(g, positions, op.width)
        mgr = self.manager
        return LocalOperator(op.support, mgr.mul(mgr.mul(u, op.mat), ud))

    def reset(self, keep: Sequence[Edge] = ()) -> None:
        self._gates.clear()
        self.manager.collect(keep)


def conjugate_through(op: LocalOperator, g: Gate, manager: DDManager) -> LocalOperator:
    """``U_g M U_g^dagger`` on the union of supports; disjoint gates pass through."""
    return Propagator(manager).conjugate(op, g)


@dataclass
class PropagationStats:
    peak_support: int = 0
    peak_nodes: int = 0


def propagate(
    d: Circuit,
    seed: LocalOperator,
    manager: DDManager,
    budget: Budget | None = None,
    *,
    deadline: float | None = None,
    trace: Callable[[LocalOperator], None] | None = None,
    stats: PropagationStats | None = None,
    propagator: Propagator | None = None,
) -> LocalOperator:
    """Fold :func:`conjugate_through` over ``d.gates`` in application order.

    Raises :class:`ResourceLimit` when the support width, the diagram size or
    the wall clock exceeds ``budget``.
    """
    budget = budget or Budget()
    if deadline is None and budget.timeout_s is not None:
        deadline = time.monotonic() + budget.timeout_s
    max_support = budget.max_support if budget.max_support is not None else d.n_qubits
    stats = stats if stats is not None else PropagationStats()
    prop = propagator or Propagator(manager)
    if max(seed.support, default=-1) >= d.n_qubits:
        raise CircuitError(f"seed support {seed.support} outside {d.n_qubits} qubits")
    op = seed
    stats.peak_support = max(stats.peak_support, op.width)
    stats.peak_nodes = max(stats.peak_nodes, manager.size(op.mat))
    if trace is not None:
        trace(op)
    collect_at = 1 << 18
    for g in d.gates:
        new = prop.conjugate(op, g)
        if new is op:
            continue
        op = new
        nodes = manager.size(op.mat)
        if op.width > stats.peak_support:
            stats.peak_support = op.width
        if nodes > stats.peak_nodes:
            stats.peak_nodes = nodes
        if trace is not None:
            trace(op)
        if op.width > max_support:
            raise ResourceLimit(f"support width {op.width} > {max_support}",
                                stats.peak_support, stats.peak_nodes)
        if nodes > budget.max_nodes:
            raise ResourceLimit(f"{nodes} nodes > {budget.max_nodes}",
                                stats.peak_support, stats.peak_nodes)
        if deadline is not None and time.monotonic() > deadline:
            raise ResourceLimit("timeout", stats.peak_support, stats.peak_nodes)
        if len(manager._unique) > collect_at:
            prop.reset([op.mat])
            collect_at = max(collect_at, 4 * len(manager._unique))
    return op


@dataclass(frozen=True)
class Witness:
    qubit: int
    basis: str
    deviation: float

    def to_json(self) -> dict:
        return {"qubit": self.qubit, "basis": self.basis, "deviation": self.deviation}


@dataclass
class Verdict:
    outcome: Outcome
    witness: Witness | None = None
    elapsed_seconds: float = 0.0
    peak_support: int = 0
    peak_nodes: int = 0
    tolerance: float = DEFAULT_TOLERANCE
    reason: str | None = None

    @property
    def equivalent(self) -> bool:
        return self.outcome is Outcome.EQUIVALENT

    def to_json(self) -> dict:
        out: dict = {"outcome": self.outcome.value}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        out["elapsed_seconds"] = self.elapsed_seconds
        out["peak_support"] = self.peak_support
        out["peak_nodes"] = self.peak_nodes
        out["tolerance"] = self.tolerance
        if self.reason is not None:
            out["reason"] = self.reason
        return out


@dataclass
class _CheckResult:
    qubit: int
    basis: str
    deviation: float | None = None
    limit: str | None = None
    stats: PropagationStats = field(default_factory=PropagationStats)


def _run_check(d: Circuit, qubit: int, basis: str, budget: Budget, kernel_tol: float,
               deadline: float | None, trace=None) -> _CheckResult:
    mgr = DDManager(kernel_tol)
    result = _CheckResult(qubit, basis)
    seed = local_operator(mgr, SEEDS[basis], qubit)
    try:
        out = propagate(d, seed, mgr, budget, deadline=deadline, trace=trace, stats=result.stats)
    except ResourceLimit as exc:
        result.limit = exc.reason
        return result
    result.deviation = mgr.max_abs_diff(out.mat, embed_on(out, SEEDS[basis], qubit, mgr))
    return result


def _run_check_star(args) -> _CheckResult:
    return _run_check(*args)


def check_equivalence(
    c0: Circuit,
    c1: Circuit,
    tol: float = DEFAULT_TOLERANCE,
    budget: Budget | None = None,
    *,
    jobs: int = 1,
    kernel_tol: float = DEFAULT_KERNEL_TOLERANCE,
    trace: Callable[[LocalOperator], None] | None = None,
) -> Verdict:
    """Decide whether ``c0`` and ``c1`` agree up to a global phase.

    Checks run qubit 0..n-1, Z before X.  Serially the first failing check
    ends the run; with ``jobs > 1`` every check is collected and the earliest
    failure in that order is reported, so the witness never depends on
    scheduling.
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    budget = budget or Budget()
    start = time.monotonic()
    deadline = None if budget.timeout_s is None else start + budget.timeout_s
    d = miter(c0, c1)
    tasks = [(d, q, b, budget, kernel_tol, deadline) for q in range(d.n_qubits) for b in ("Z", "X")]
    verdict = Verdict(Outcome.EQUIVALENT, tolerance=tol)

    def absorb(res: _CheckResult) -> bool:
        verdict.peak_support = max(verdict.peak_support, res.stats.peak_support)
        verdict.peak_nodes = max(verdict.peak_nodes, res.stats.peak_nodes)
        if res.limit is not None:
            verdict.outcome = Outcome.RESOURCE_LIMIT
            verdict.reason = res.limit
            return True
        if res.deviation > tol:
            verdict.outcome = Outcome.INEQUIVALENT
            verdict.witness = Witness(res.qubit, res.basis, res.deviation)
            return True
        return False

    if jobs > 1 and trace is None and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_check_star, tasks))
        for res in results:
            if absorb(res):
                break
    else:
        for task in tasks:
            if absorb(_run_check(*task, trace=trace)):
                break
    verdict.elapsed_seconds = time.monotonic() - start
    return verdict


class Fingerprint(list):
    """Per-qubit output-state projectors of one circuit, all in ``manager``."""

    def __init__(self, ops, n_qubits: int, manager: DDManager, complete: bool = True) -> None:
        super().__init__(ops)
        self.n_qubits = n_qubits
        self.manager = manager
        self.complete = complete


def fingerprint(c: Circuit, budget: Budget | None = None,
                manager: DDManager | None = None) -> Fingerprint:
    """``C |0><0|_i C^dagger`` for every qubit ``i``.

    Each projector ``P_i`` satisfies ``P_i C|0..0> = C|0..0>``.  On budget
    exhaustion the remaining entries are ``None`` and ``complete`` is False.
    """
    mgr = manager or DDManager(DEFAULT_KERNEL_TOLERANCE)
    budget = budget or Budget()
    deadline = None if budget.timeout_s is None else time.monotonic() + budget.timeout_s
    prop = Propagator(mgr)
    ops: list[LocalOperator | None] = []
    for q in range(c.n_qubits):
        try:
            ops.append(propagate(c, local_operator(mgr, PROJ_ZERO, q), mgr, budget,
                                 deadline=deadline, propagator=prop))
        except ResourceLimit:
            ops.extend([None] * (c.n_qubits - q))
            return Fingerprint(ops, c.n_qubits, mgr, complete=False)
    return Fingerprint(ops, c.n_qubits, mgr)


def compare_fingerprints(f0: Fingerprint, f1: Fingerprint, tol: float = DEFAULT_TOLERANCE) -> bool:
    """True iff every per-qubit projector agrees within ``tol``.

    Supports are aligned by padding both operators with identity to their
    union.  This compares constraints on the output *state* ``C|0..0>`` only;
    circuits with different unitaries can share a fingerprint.
    """
    if f0.n_qubits != f1.n_qubits:
        raise CircuitError(f"width mismatch: {f0.n_qubits} vs {f1.n_qubits}")
    if not (f0.complete and f1.complete):
        raise ValueError("cannot compare incomplete fingerprints")
    mgr = f0.manager
    for a, b in zip(f0, f1):
        if f1.manager is not mgr:
            b = LocalOperator(b.support, mgr.adopt(b.mat))
        union = sorted(set(a.support).union(b.support))
        a = extend(a, union, mgr)
        b = extend(b, union, mgr)
        if mgr.max_abs_diff(a.mat, b.mat) > tol:
            return False
    return True
