import math

import numpy as np
import pytest

from pbec.circuit import gate_matrix
from pbec.wbdd import DDError, DDManager, TERMINAL, ZERO

H = gate_matrix("h")
X = gate_matrix("x")
Z = gate_matrix("z")
S = gate_matrix("s")
T = gate_matrix("t")
I2 = np.eye(2)
KET0 = np.array([1, 0])
KET1 = np.array([0, 1])


@pytest.fixture
def m():
    return DDManager()


def random_dense(rng, levels, matrix=True):
    dim = 2 ** levels
    shape = (dim, dim) if matrix else (dim,)
    a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    a[rng.random(shape) < 0.3] = 0
    return a


class TestConstruction:
    def test_identity_one_qubit(self, m):
        e = m.from_dense(I2)
        assert e.weight == 1
        assert [w for w, _ in e.node.edges] == [1, 0, 0, 1]
        assert e.node.ident
        assert e == m.identity(1)

    def test_hadamard_normalization(self, m):
        e = m.from_dense(H)
        assert e.weight == pytest.approx(1 / math.sqrt(2))
        assert [w for w, _ in e.node.edges] == [1, 1, 1, -1]

    def test_zero_matrix_is_terminal_zero(self, m):
        assert m.from_dense(np.zeros((2, 2))) == ZERO
        assert m.from_dense(np.full((4, 4), 1e-16)) == ZERO

    def test_non_finite_rejected(self, m):
        with pytest.raises(DDError):
            m.from_dense(np.array([[1, np.nan], [0, 1]]))
        with pytest.raises(DDError):
            m.product([np.array([[np.inf, 0], [0, 1]])])

    def test_bad_shapes(self, m):
        with pytest.raises(DDError):
            m.from_dense(np.ones((2, 4)))
        with pytest.raises(DDError):
            m.from_dense(np.ones(3))

    def test_normalized_max_child_is_one(self, m):
        gen = np.random.default_rng(3)
        e = m.from_dense(random_dense(gen, 3))
        stack, seen = [e.node], set()
        while stack:
            x = stack.pop()
            if x is TERMINAL or id(x) in seen:
                continue
            seen.add(id(x))
            mags = [abs(w) for w, _ in x.edges]
            first = mags.index(max(mags))
            assert x.edges[first][0] == 1
            stack.extend(n for _, n in x.edges)

    def test_rebuild_from_dense_is_identical(self, m):
        gen = np.random.default_rng(4)
        for levels in range(1, 5):
            e = m.from_dense(random_dense(gen, levels))
            again = m.from_dense(m.to_dense(e))
            assert again.node is e.node
            assert abs(again.weight - e.weight) <= m.tol

    def test_product_matches_kron(self, m):
        e = m.product([Z, H, X])
        np.testing.assert_allclose(m.to_dense(e), np.kron(Z, np.kron(H, X)), atol=1e-15)

    def test_embed_two_qubit_nonadjacent_and_reversed(self, m):
        cx = gate_matrix("cx")
        # control on level 2, target on level 0, identity in between
        e = m.embed(cx, [2, 0], 3)
        dense = np.zeros((8, 8))
        for col in range(8):
            b0, b1, b2 = (col >> 2) & 1, (col >> 1) & 1, col & 1
            row = ((b0 ^ b2) << 2) | (b1 << 1) | b2
            dense[row, col] = 1
        np.testing.assert_allclose(m.to_dense(e), dense, atol=1e-15)

    def test_insert_identity(self, m):
        a = m.product([Z, X])
        for pos, expect in [(0, np.kron(I2, np.kron(Z, X))),
                            (1, np.kron(Z, np.kron(I2, X))),
                            (2, np.kron(Z, np.kron(X, I2)))]:
            np.testing.assert_allclose(m.to_dense(m.insert_identity(a, pos)), expect, atol=1e-15)


class TestArithmetic:
    def test_add_cancels(self, m):
        h = m.from_dense(H)
        assert m.add(h, m.scale(h, -1)) == ZERO

    def test_resolution_of_identity(self, m):
        p0 = m.from_dense(np.diag([1, 0]))
        p1 = m.from_dense(np.diag([0, 1]))
        assert m.add(p0, p1) == m.identity(1)

    def test_add_z_x(self, m):
        got = m.to_dense(m.add(m.from_dense(Z), m.from_dense(X)))
        np.testing.assert_allclose(got, [[1, 1], [1, -1]], atol=1e-15)

    def test_add_is_commutative(self, m):
        gen = np.random.default_rng(5)
        a = m.from_dense(random_dense(gen, 3))
        b = m.from_dense(random_dense(gen, 3))
        assert m.add(a, b) == m.add(b, a)

    def test_shape_mismatch(self, m):
        with pytest.raises(DDError):
            m.add(m.identity(1), m.identity(2))
        with pytest.raises(DDError):
            m.mul(m.identity(1), m.identity(2))
        with pytest.raises(DDError):
            m.add(m.from_dense(KET0), m.identity(1))
        with pytest.raises(DDError):
            m.mul(m.from_dense(KET0), m.identity(1))

    def test_hh_is_identity(self, m):
        h = m.from_dense(H)
        assert m.max_abs_diff(m.mul(h, h), m.identity(1)) <= m.tol

    def test_x_flips_ket0(self, m):
        assert m.mul(m.from_dense(X), m.from_dense(KET0)) == m.from_dense(KET1)

    def test_s_squared_is_z(self, m):
        s = m.from_dense(S)
        assert m.max_abs_diff(m.mul(s, s), m.from_dense(Z)) <= m.tol

    def test_kron_identities(self, m):
        assert m.kron(m.identity(1), m.identity(1)) == m.identity(2)
        v = m.to_dense(m.kron(m.from_dense(KET0), m.from_dense(KET1)))
        np.testing.assert_allclose(v, [0, 1, 0, 0])

    def test_kron_dense(self, m):
        got = m.to_dense(m.kron(m.from_dense(Z), m.from_dense(X)))
        np.testing.assert_allclose(got, np.kron(Z, X), atol=1e-15)

    def test_kron_rejects_mixed(self, m):
        with pytest.raises(DDError):
            m.kron(m.from_dense(KET0), m.identity(1))

    def test_adjoint(self, m):
        h = m.from_dense(H)
        assert m.adjoint(h) == h
        np.testing.assert_allclose(m.to_dense(m.adjoint(m.from_dense(S))), np.diag([1, -1j]))
        a = m.from_dense(random_dense(np.random.default_rng(6), 2))
        assert m.adjoint(m.adjoint(a)) == a
        with pytest.raises(DDError):
            m.adjoint(m.from_dense(KET0))

    def test_unitarity_of_gate_product(self, m):
        cx = gate_matrix("cx")
        u_dense = np.kron(H, T) @ cx @ np.kron(S, H) @ cx[[0, 1, 3, 2]]
        u = m.from_dense(u_dense)
        assert m.max_abs_diff(m.mul(m.adjoint(u), u), m.identity(2)) <= 1e-12
        np.testing.assert_allclose(u_dense.conj().T @ u_dense, np.eye(4), atol=1e-12)


class TestInspection:
    def test_max_abs_diff_examples(self, m):
        x = m.from_dense(X)
        assert m.max_abs_diff(x, x) == 0
        assert m.max_abs_diff(m.identity(1), m.from_dense(Z)) == pytest.approx(2)
        shifted = np.diag([1, np.exp(1j * (math.pi / 4 + 1e-7))])
        d = m.max_abs_diff(m.from_dense(shifted), m.from_dense(T))
        expect = 2 * math.sin(0.5e-7)
        assert abs(d - expect) <= 0.1 * expect

    def test_max_abs_matches_dense(self, m):
        gen = np.random.default_rng(8)
        for levels in range(1, 5):
            a = random_dense(gen, levels)
            assert m.max_abs(m.from_dense(a)) == pytest.approx(np.abs(a).max(), rel=1e-12)

    def test_to_dense_examples(self, m):
        s2 = 1 / math.sqrt(2)
        np.testing.assert_allclose(m.to_dense(m.from_dense(H)), [[s2, s2], [s2, -s2]])
        cx = m.to_dense(m.embed(gate_matrix("cx"), [0, 1], 2))
        np.testing.assert_allclose(cx, np.eye(4)[[0, 1, 3, 2]])
        hh = m.kron(m.from_dense(H), m.from_dense(H))
        psi = m.to_dense(m.mul(hh, m.basis_vector([0, 0])))
        np.testing.assert_allclose(psi, [0.5] * 4, atol=1e-15)

    def test_to_dense_cap(self, m):
        big = m.identity(13)
        with pytest.raises(DDError):
            m.to_dense(big)
        assert m.to_dense(m.identity(3), cap=3).shape == (8, 8)

    def test_to_dense_zero_needs_shape(self, m):
        np.testing.assert_array_equal(m.to_dense(ZERO, levels=2, matrix=True), np.zeros((4, 4)))
        np.testing.assert_array_equal(m.to_dense(ZERO, levels=1, matrix=False), np.zeros(2))
        with pytest.raises(DDError):
            m.to_dense(ZERO, levels=2)

    def test_size(self, m):
        assert m.size(m.identity(5)) == 5
        assert m.size(ZERO) == 0

    def test_dump_is_deterministic_golden(self, m):
        text = m.dump(m.embed(gate_matrix("cx"), [0, 1], 2))
        assert text == (
            "root (1,0)*n0\n"
            "n0 level=0 (1,0)*n1 0 0 (1,0)*n2\n"
            "n1 level=1 (1,0)*T 0 0 (1,0)*T\n"
            "n2 level=1 0 (1,0)*T (1,0)*T 0"
        )
        other = DDManager()
        assert other.dump(other.embed(gate_matrix("cx"), [0, 1], 2)) == text

    def test_dump_weights_have_17_digits(self, m):
        assert "(0.70710678118654757,0)" in m.dump(m.from_dense(H))


class TestHousekeeping:
    def test_cache_purge_is_invisible(self, m):
        gen = np.random.default_rng(9)
        a = m.from_dense(random_dense(gen, 3))
        b = m.from_dense(random_dense(gen, 3))
        before = m.mul(a, b)
        m.clear_caches()
        assert m.mul(a, b) == before

    def test_collect_keeps_roots_canonical(self, m):
        gen = np.random.default_rng(10)
        dense = random_dense(gen, 3)
        a = m.from_dense(dense)
        m.from_dense(random_dense(gen, 4))
        m.collect([a])
        assert m.stats()["unique_nodes"] <= m.size(a) + 3
        assert m.from_dense(dense).node is a.node

    def test_adopt_across_managers(self, m):
        other = DDManager()
        a = other.from_dense(np.kron(H, T))
        b = m.adopt(a)
        np.testing.assert_allclose(m.to_dense(b), np.kron(H, T), atol=1e-15)
        assert b.node is m.from_dense(np.kron(H, T)).node

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            DDManager(0)

    def test_near_equal_weights_share_across_bucket_boundary(self):
        m = DDManager(tol=1e-10)
        base = 0.3 - (0.3 % 1e-10)  # a bucket edge
        lo = m.cval(complex(base - 1e-12, 0.2))
        hi = m.cval(complex(base + 1e-12, 0.2))
        assert lo == hi
