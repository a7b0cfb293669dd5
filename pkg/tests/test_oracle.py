import math

import numpy as np
import pytest

from conftest import brute_unitary
from pbec.circuit import Circuit, CircuitError, gate, random_circuit
from pbec.mutate import mutate
from pbec.oracle import dense_state, dense_unitary, oracle_equivalent
from pbec.randgen import GenProfile, generate
from pbec.wbdd import DDManager
from pbec.circuit import circuit_unitary


def test_empty_is_identity():
    np.testing.assert_array_equal(dense_unitary(Circuit(2)), np.eye(4))


def test_bell_state():
    u = dense_unitary(Circuit(2, (gate("h", 0), gate("cx", 0, 1))))
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(u[:, 0], [s, 0, 0, s], atol=1e-15)
    np.testing.assert_allclose(dense_state(Circuit(2, (gate("h", 0), gate("cx", 0, 1)))),
                               [s, 0, 0, s], atol=1e-15)


def test_matches_brute_force_and_diagram(rng):
    m = DDManager()
    for n in range(1, 6):
        c = random_circuit(n, 20, rng)
        u = dense_unitary(c)
        np.testing.assert_allclose(u, brute_unitary(c), atol=1e-12)
        np.testing.assert_allclose(m.to_dense(circuit_unitary(c, m)), u, atol=1e-12)


def test_reflexive_and_global_phase():
    c = generate(GenProfile(4, 5, seed=1))
    assert oracle_equivalent(c, c)
    assert oracle_equivalent(Circuit(1, (gate("z", 0),)), Circuit(1, (gate("rz", 0, angle=math.pi),)))


def test_rm_mutants_are_inequivalent():
    for seed in range(100):
        c = generate(GenProfile(4, 3, seed=seed))
        mutant, injected = mutate(c, "rm", seed)
        assert injected
        assert not oracle_equivalent(c, mutant)


def test_symmetric(rng):
    for _ in range(20):
        a = random_circuit(3, 6, rng, kinds=["h", "s", "t", "cx"])
        b = random_circuit(3, 6, rng, kinds=["h", "s", "t", "cx"])
        assert oracle_equivalent(a, b) == oracle_equivalent(b, a)
        assert oracle_equivalent(a, a)


def test_unitarity_up_to_ten_qubits():
    for n in (2, 6, 10):
        u = dense_unitary(generate(GenProfile(n, 12, seed=n)))
        assert np.abs(u.conj().T @ u - np.eye(2 ** n)).max() <= 1e-10


def test_limits():
    with pytest.raises(CircuitError):
        dense_unitary(Circuit(13))
    with pytest.raises(CircuitError):
        oracle_equivalent(Circuit(2), Circuit(3))
