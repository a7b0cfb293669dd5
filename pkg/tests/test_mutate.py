import math

import numpy as np
import pytest

from conftest import brute_unitary
from pbec.circuit import Circuit, CircuitError, gate
from pbec.engine import Outcome, check_equivalence
from pbec.mutate import mutate, shift_delta
from pbec.oracle import oracle_equivalent
from pbec.randgen import GenProfile, generate


def test_rm_single_gate():
    c = Circuit(1, (gate("h", 0),))
    mutant, injected = mutate(c, "rm", 0)
    assert injected and mutant.gates == ()
    assert check_equivalence(c, mutant).outcome is Outcome.INEQUIVALENT


def test_rm_empty_raises():
    with pytest.raises(CircuitError):
        mutate(Circuit(2), "gm", 0)


def test_flip():
    c = Circuit(2, (gate("cx", 0, 1),))
    mutant, injected = mutate(c, "flip", 5)
    assert injected and mutant.gates == (gate("cx", 1, 0),)
    assert not np.allclose(brute_unitary(c), brute_unitary(mutant))


def test_flip_without_cx():
    c = Circuit(2, (gate("h", 0),))
    assert mutate(c, "flip", 1) == (c, False)


def test_shift7_on_t():
    c = Circuit(1, (gate("t", 0),))
    mutant, injected = mutate(c, "shift7", 0)
    assert injected
    assert mutant.gates == (gate("u1", 0, angle=math.pi / 4 + 1e-7),)
    v = check_equivalence(c, mutant, tol=1e-15)
    assert v.outcome is Outcome.INEQUIVALENT
    assert v.witness.deviation == pytest.approx(2 * math.sin(0.5e-7), rel=1e-6)


def test_shift_on_rz_keeps_kind():
    c = Circuit(1, (gate("h", 0), gate("rz", 0, angle=0.3)))
    mutant, injected = mutate(c, "shift4", 2)
    assert injected and mutant.gates[1] == gate("rz", 0, angle=0.3 + 1e-4)


def test_shift_without_phase_gates_is_equivalent():
    c = Circuit(2, (gate("h", 0), gate("cx", 0, 1), gate("x", 1)))
    mutant, injected = mutate(c, "shift4", 3)
    assert not injected and mutant == c
    assert check_equivalence(c, mutant).equivalent


def test_shift_delta_parsing():
    assert shift_delta("shift4") == 1e-4
    assert shift_delta("shift7") == 1e-7
    assert shift_delta("shift(0.5)") == 0.5
    assert shift_delta("gm") is None
    with pytest.raises(ValueError):
        mutate(Circuit(1, (gate("t", 0),)), "bogus", 0)


def test_deterministic():
    c = generate(GenProfile(6, 5, seed=9))
    for v in ("rm", "flip", "shift4"):
        assert mutate(c, v, 42) == mutate(c, v, 42)


@pytest.mark.parametrize("variant", ["rm", "gm", "flip", "shift4", "shift7"])
def test_injected_means_inequivalent(variant):
    for seed in range(25):
        c = generate(GenProfile(2 + seed % 5, 1 + seed % 6, seed=seed))
        mutant, injected = mutate(c, variant, seed)
        if not injected:
            assert check_equivalence(c, mutant).equivalent
            continue
        assert not oracle_equivalent(c, mutant)
        assert check_equivalence(c, mutant).outcome is Outcome.INEQUIVALENT
