"""Quantum circuit equivalence checking by local projection propagation."""

from .circuit import Circuit, Gate, GateKind, adjoint_circuit, concat, gate, layers
from .engine import (
    Budget,
    LocalOperator,
    Outcome,
    Verdict,
    Witness,
    check_equivalence,
    compare_fingerprints,
    conjugate_through,
    fingerprint,
    miter,
    propagate,
)
from .mutate import mutate
from .opt import optimize
from .oracle import oracle_equivalent
from .qasm import emit, parse
from .randgen import GenProfile, generate
from .wbdd import DDManager, Edge

__all__ = [
    "Budget",
    "Circuit",
    "DDManager",
    "Edge",
    "Gate",
    "GenProfile",
    "GateKind",
    "LocalOperator",
    "Outcome",
    "Verdict",
    "Witness",
    "adjoint_circuit",
    "check_equivalence",
    "compare_fingerprints",
    "concat",
    "conjugate_through",
    "emit",
    "fingerprint",
    "gate",
    "generate",
    "layers",
    "miter",
    "mutate",
    "optimize",
    "oracle_equivalent",
    "parse",
    "propagate",
]
