"""Peephole optimizer whose every rewrite is an exact unitary identity.

Rules, applied to gates that are adjacent on all of their wires:

* cancel inverse pairs on identical qubit tuples (H H, S Sdg, T Tdg, X X,
  Y Y, Z Z, SX SXdg, CX CX, CZ CZ, SWAP SWAP);
* fuse T T -> S, Tdg Tdg -> Sdg, S S -> Z, Sdg Sdg -> Z;
* merge Rz(a) Rz(b) -> Rz(a + b) and drop Rz(0) / U1(0);

then gates are put in a canonical order: among all gates whose wire
predecessors are already placed, the one with the smallest lowest qubit goes
first.  That is the unique order in which no two adjacent, disjoint gates
are out of order by lowest qubit.
"""

from __future__ import annotations

import heapq

from .circuit import Circuit, Gate, GateKind

K = GateKind

_CANCEL = {
    (K.H, K.H), (K.X, K.X), (K.Y, K.Y), (K.Z, K.Z),
    (K.S, K.SDG), (K.SDG, K.S), (K.T, K.TDG), (K.TDG, K.T),
    (K.SX, K.SXDG), (K.SXDG, K.SX),
    (K.CX, K.CX), (K.CZ, K.CZ), (K.SWAP, K.SWAP),
}
_FUSE = {
    (K.T, K.T): K.S,
    (K.TDG, K.TDG): K.SDG,
    (K.S, K.S): K.Z,
    (K.SDG, K.SDG): K.Z,
}
_SYMMETRIC = {K.CZ, K.SWAP}

_KEEP = object()


def _same_wires(a: Gate, b: Gate) -> bool:
    if a.qubits == b.qubits:
        return True
    return a.kind in _SYMMETRIC and a.kind == b.kind and set(a.qubits) == set(b.qubits)


def _combine(a: Gate, b: Gate):
    """Replacement for ``a`` then ``b``: a list of gates, or ``_KEEP`` if no rule fires."""
    if not _same_wires(a, b):
        return _KEEP
    if (a.kind, b.kind) in _CANCEL:
        return []
    fused = _FUSE.get((a.kind, b.kind))
    if fused is not None:
        return [Gate(fused, a.qubits)]
    if a.kind is K.RZ and b.kind is K.RZ:
        total = a.angle + b.angle
        return [] if total == 0 else [Gate(K.RZ, a.qubits, total)]
    return _KEEP


def _is_trivial(g: Gate) -> bool:
    return g.kind in (K.RZ, K.U1) and g.angle == 0


def cancel_pass(gates: list[Gate], n_qubits: int) -> list[Gate]:
    out: list[Gate | None] = []
    wires: list[list[int]] = [[] for _ in range(n_qubits)]
    for g in gates:
        if _is_trivial(g):
            continue
        tops = {wires[q][-1] if wires[q] else -1 for q in g.qubits}
        if len(tops) == 1:
            j = tops.pop()
            prev = out[j] if j >= 0 else None
            if prev is not None and set(prev.qubits) == set(g.qubits):
                repl = _combine(prev, g)
                if repl is not _KEEP:
                    if repl:
                        out[j] = repl[0]
                    else:
                        out[j] = None
                        for q in g.qubits:
                            wires[q].pop()
                    continue
        out.append(g)
        for q in g.qubits:
            wires[q].append(len(out) - 1)
    return [g for g in out if g is not None]


def canonical_order(gates: list[Gate], n_qubits: int) -> list[Gate]:
    last: list[int] = [-1] * n_qubits
    pending = [0] * len(gates)
    succ: list[list[int]] = [[] for _ in gates]
    for i, g in enumerate(gates):
        preds = {last[q] for q in g.qubits if last[q] >= 0}
        pending[i] = len(preds)
        for p in preds:
            succ[p].append(i)
        for q in g.qubits:
            last[q] = i
    heap = [(min(g.qubits), i) for i, g in enumerate(gates) if pending[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, i = heapq.heappop(heap)
        order.append(gates[i])
        for s in succ[i]:
            pending[s] -= 1
            if pending[s] == 0:
                heapq.heappush(heap, (min(gates[s].qubits), s))
    return order


def optimize(c: Circuit, passes: int = 64) -> Circuit:
    """Rewrite ``c`` until nothing changes or ``passes`` rounds have run."""
    if passes < 1:
        raise ValueError("passes must be >= 1")
    gates = list(c.gates)
    for _ in range(passes):
        new = canonical_order(cancel_pass(gates, c.n_qubits), c.n_qubits)
        if new == gates:
            break
        gates = new
    return Circuit(c.n_qubits, tuple(gates))
