"""Inequivalence injection: gate removal, CNOT flips and small phase shifts."""

from __future__ import annotations

import math
import re

from .circuit import DIAGONAL_PHASE_KINDS, Circuit, CircuitError, Gate, GateKind
from .randgen import Xoshiro256

VARIANTS = ("rm", "gm", "flip", "shift4", "shift7")

_PHASE_ANGLE = {
    GateKind.T: math.pi / 4,
    GateKind.TDG: -math.pi / 4,
    GateKind.S: math.pi / 2,
    GateKind.SDG: -math.pi / 2,
}


def shift_delta(variant: str) -> float | None:
    """``10**-K`` for ``shiftK``, the literal value for ``shift(δ)``, else None."""
    m = re.fullmatch(r"shift(\d+)", variant)
    if m:
        return 10.0 ** -int(m.group(1))
    m = re.fullmatch(r"shift\((.+)\)", variant)
    if m:
        return float(m.group(1))
    return None


def _shifted(g: Gate, delta: float) -> Gate:
    if g.kind in (GateKind.RZ, GateKind.U1):
        return Gate(g.kind, g.qubits, g.angle + delta)
    return Gate(GateKind.U1, g.qubits, _PHASE_ANGLE[g.kind] + delta)


def mutate(c: Circuit, variant: str, seed: int) -> tuple[Circuit, bool]:
    """Return ``(mutant, injected)``.

    ``rm``/``gm`` delete one uniformly chosen gate.  ``flip`` swaps control
    and target of one uniformly chosen CX.  ``shiftK`` adds ``10**-K`` to the
    phase of one uniformly chosen diagonal phase gate (Rz, U1, T, Tdg, S,
    Sdg), writing it back as Rz or U1.  When no eligible gate exists the
    circuit comes back unchanged with ``injected=False``.
    """
    rng = Xoshiro256(seed)
    gates = list(c.gates)
    if variant in ("rm", "gm"):
        if not gates:
            raise CircuitError("cannot remove a gate from an empty circuit")
        del gates[rng.below(len(gates))]
        return c.with_gates(gates), True
    if variant == "flip":
        sites = [i for i, g in enumerate(gates) if g.kind is GateKind.CX]
        if not sites:
            return c, False
        i = sites[rng.below(len(sites))]
        gates[i] = Gate(GateKind.CX, gates[i].qubits[::-1])
        return c.with_gates(gates), True
    delta = shift_delta(variant)
    if delta is None:
        raise ValueError(f"unknown variant {variant!r}")
    sites = [i for i, g in enumerate(gates) if g.kind in DIAGONAL_PHASE_KINDS]
    if not sites:
        return c, False
    i = sites[rng.below(len(sites))]
    gates[i] = _shifted(gates[i], delta)
    return c.with_gates(gates), True
