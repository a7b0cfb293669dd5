"""Weighted binary decision diagrams for complex vectors and square matrices.

Diagrams are quasi-reduced: every non-zero path visits every level, and only
zero edges jump straight to the terminal.  Nodes record their *height* (the
number of levels from the node down to the terminal) rather than an absolute
level, so a sub-diagram can be shared between operators of different widths.
Level 0 of a ``k``-level diagram is its root and corresponds to the most
significant bit of the row/column index.

Edge weights are canonicalized through a tolerance-aware complex table and
nodes are hash-consed in a unique table, so two constructions of the same
operator (up to the kernel tolerance) return the same node object.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "DDError",
    "DDManager",
    "Edge",
    "Node",
    "ONE",
    "TERMINAL",
    "ZERO",
]

DEFAULT_TOLERANCE = 1e-13
DENSE_LEVEL_CAP = 12


class DDError(ValueError):
    """Raised on shape mismatches and invalid constructions."""


class Node:
    """A diagram node with 2 (vector) or 4 (matrix, row-major) child edges."""

    __slots__ = ("height", "edges", "ident")

    def __init__(self, height: int, edges: tuple, ident: bool) -> None:
        self.height = height
        self.edges = edges
        self.ident = ident

    @property
    def is_terminal(self) -> bool:
        return self.height == 0

    @property
    def is_matrix(self) -> bool:
        return len(self.edges) == 4

    def __repr__(self) -> str:
        if self.height == 0:
            return "Node(terminal)"
        kind = "matrix" if len(self.edges) == 4 else "vector"
        return f"Node({kind}, height={self.height}, id={id(self):#x})"


class Edge(NamedTuple):
    weight: complex
    node: Node


TERMINAL = Node(0, (), True)
ZERO = Edge(0j, TERMINAL)
ONE = Edge(1 + 0j, TERMINAL)

_SQRT1_2 = math.sqrt(0.5)
_SEED_VALUES = (1, -1, 1j, -1j, 0.5, -0.5, 0.5j, -0.5j, _SQRT1_2, -_SQRT1_2,
                _SQRT1_2 * 1j, -_SQRT1_2 * 1j)


class DDManager:
    """Owns the unique table, the complex table and the operation caches.

    A manager and every edge it produced must be used from one thread at a
    time.  Edges from different managers must not be mixed; use :meth:`adopt`
    to copy a diagram across.
    """

    def __init__(self, tol: float = DEFAULT_TOLERANCE, max_cache: int = 1 << 20) -> None:
        if not tol > 0:
            raise ValueError("kernel tolerance must be positive")
        self.tol = float(tol)
        self.max_cache = max_cache
        self._unique: dict[tuple, Node] = {}
        self._ctable: dict[tuple[int, int], list[complex]] = {}
        self._seen: dict[complex, complex] = {}
        self._mul_c: dict = {}
        self._add_c: dict = {}
        self._kron_c: dict = {}
        self._adj_c: dict = {}
        self._norm_c: dict = {}
        self._ins_c: dict = {}
        self._ident_c: dict[int, Edge] = {0: ONE}
        self.nodes_created = 0
        self._seed_ctable()

    # ------------------------------------------------------------------
    # complex table

    def _seed_ctable(self) -> None:
        for v in _SEED_VALUES:
            self.cval(complex(v))
        for v in (0.5 + 0.5j, 0.5 - 0.5j, -0.5 + 0.5j, -0.5 - 0.5j):
            self.cval(v)

    def cval(self, z: complex) -> complex:
        """Return the canonical representative of ``z`` (0j if negligible)."""
        tol = self.tol
        re = z.real
        im = z.imag
        if -tol <= re <= tol and -tol <= im <= tol:
            return 0j
        hit = self._seen.get(z)
        if hit is not None:
            return hit
        if not (math.isfinite(re) and math.isfinite(im)):
            raise DDError(f"non-finite weight {z!r}")
        br = math.floor(re / tol)
        bi = math.floor(im / tol)
        table = self._ctable
        for dr in (0, -1, 1):
            for di in (0, -1, 1):
                bucket = table.get((br + dr, bi + di))
                if bucket:
                    for v in bucket:
                        if abs(v.real - re) <= tol and abs(v.imag - im) <= tol:
                            self._seen[z] = v
                            return v
        z = complex(re, im)
        table.setdefault((br, bi), []).append(z)
        self._seen[z] = z
        return z

    def scale(self, e: Edge, w: complex) -> Edge:
        ew = e[0]
        if ew == 0 or w == 0:
            return ZERO
        v = self.cval(ew * w)
        if v == 0:
            return ZERO
        return Edge(v, e[1])

    # ------------------------------------------------------------------
    # node construction

    def make_node(self, height: int, children: Sequence[Edge]) -> Edge:
        """Normalize ``children`` and return the canonical edge to the node."""
        tol = self.tol
        mags = [abs(w) for w, _ in children]
        m = max(mags)
        if m <= tol:
            if all(self.cval(w) == 0 for w, _ in children):
                return ZERO
        cutoff = m - tol * max(1.0, m)
        idx = 0
        for idx, mag in enumerate(mags):
            if mag >= cutoff:
                break
        top = children[idx][0]
        out = []
        for j, (w, n) in enumerate(children):
            if j == idx:
                out.append(Edge(1 + 0j, n))
                continue
            if w == 0:
                out.append(ZERO)
                continue
            v = self.cval(w / top)
            out.append(ZERO if v == 0 else Edge(v, n))
        key = tuple(out)
        node = self._unique.get(key)
        if node is None:
            ident = (
                len(key) == 4
                and key[1][0] == 0
                and key[2][0] == 0
                and key[0] == key[3]
                and key[0][1].ident
            )
            node = Node(height, key, ident)
            self._unique[key] = node
            self.nodes_created += 1
        top = self.cval(top)
        if top == 0:
            return ZERO
        return Edge(top, node)

    def identity(self, levels: int) -> Edge:
        e = self._ident_c.get(levels)
        if e is None:
            e = self.identity(levels - 1)
            e = self.make_node(levels, (e, ZERO, ZERO, e))
            self._ident_c[levels] = e
        return e

    def from_dense(self, array) -> Edge:
        """Build a diagram from a dense ``2^k`` vector or ``2^k x 2^k`` matrix."""
        a = np.asarray(array, dtype=complex)
        if not np.all(np.isfinite(a)):
            raise DDError("non-finite entry in dense input")
        if a.ndim == 2:
            rows, cols = a.shape
            if rows != cols:
                raise DDError(f"matrix must be square, got {a.shape}")
            levels = _log2_exact(rows)
            return self._from_dense_matrix(a, levels)
        if a.ndim == 1:
            levels = _log2_exact(a.shape[0])
            return self._from_dense_vector(a, levels)
        raise DDError(f"expected a vector or a matrix, got ndim={a.ndim}")

    def _from_dense_matrix(self, a: np.ndarray, levels: int) -> Edge:
        if levels == 0:
            v = self.cval(complex(a[0, 0]))
            return ZERO if v == 0 else Edge(v, TERMINAL)
        h = a.shape[0] // 2
        kids = (
            self._from_dense_matrix(a[:h, :h], levels - 1),
            self._from_dense_matrix(a[:h, h:], levels - 1),
            self._from_dense_matrix(a[h:, :h], levels - 1),
            self._from_dense_matrix(a[h:, h:], levels - 1),
        )
        return self.make_node(levels, kids)

    def _from_dense_vector(self, a: np.ndarray, levels: int) -> Edge:
        if levels == 0:
            v = self.cval(complex(a[0]))
            return ZERO if v == 0 else Edge(v, TERMINAL)
        h = a.shape[0] // 2
        kids = (
            self._from_dense_vector(a[:h], levels - 1),
            self._from_dense_vector(a[h:], levels - 1),
        )
        return self.make_node(levels, kids)

    def product(self, factors: Sequence) -> Edge:
        """Kronecker product of 2x2 matrices, ``factors[0]`` on the top level."""
        e = ONE
        for height, f in enumerate(reversed(factors), start=1):
            f = np.asarray(f, dtype=complex)
            if f.shape != (2, 2):
                raise DDError("product factors must be 2x2")
            if not np.all(np.isfinite(f)):
                raise DDError("non-finite entry in factor")
            e = self.make_node(height, tuple(self.scale(e, complex(x)) for x in f.flat))
        return e

    def basis_vector(self, bits: Sequence[int]) -> Edge:
        """Computational basis state ``|bits>`` with ``bits[0]`` most significant."""
        e = ONE
        for height, b in enumerate(reversed(bits), start=1):
            kids = (e, ZERO) if b == 0 else (ZERO, e)
            e = self.make_node(height, kids)
        return e

    def embed(self, matrix, positions: Sequence[int], levels: int) -> Edge:
        """Place a 1- or 2-qubit matrix on ``positions`` of a ``levels``-level identity.

        For two-qubit matrices ``positions[0]`` receives the more significant
        qubit of ``matrix``; the positions need not be adjacent or ordered.
        """
        m = np.asarray(matrix, dtype=complex)
        eye = np.eye(2, dtype=complex)
        if len(positions) == 1:
            factors = [eye] * levels
            factors[positions[0]] = m
            return self.product(factors)
        if len(positions) != 2 or positions[0] == positions[1]:
            raise DDError("embed supports one or two distinct positions")
        pa, pb = positions
        total = ZERO
        for p in (0, 1):
            for q in (0, 1):
                block = m[2 * p:2 * p + 2, 2 * q:2 * q + 2]
                if not np.any(block):
                    continue
                unit = np.zeros((2, 2), dtype=complex)
                unit[p, q] = 1
                factors = [eye] * levels
                factors[pa] = unit
                factors[pb] = block
                total = self.add(total, self.product(factors))
        return total

    def insert_identity(self, e: Edge, position: int) -> Edge:
        """Tensor an identity level into matrix ``e`` so it sits at ``position``."""
        w, x = e
        if w == 0:
            return ZERO
        if not 0 <= position <= x.height:
            raise DDError(f"insert position {position} outside 0..{x.height}")
        if x.height and len(x.edges) != 4:
            raise DDError("insert_identity expects a matrix")
        return self.scale(self._insert(x, x.height - position), w)

    def _insert(self, x: Node, below: int) -> Edge:
        # ``below`` counts the levels that must stay underneath the new one
        if x.height == below:
            one = Edge(1 + 0j, x)
            return self.make_node(x.height + 1, (one, ZERO, ZERO, one))
        key = (x, below)
        r = self._ins_c.get(key)
        if r is not None:
            return r
        kids = tuple(
            ZERO if w == 0 else self.scale(self._insert(n, below), w) for w, n in x.edges
        )
        r = self.make_node(x.height + 1, kids)
        self._cache_put(self._ins_c, key, r)
        return r

    # ------------------------------------------------------------------
    # arithmetic

    def _cache_put(self, cache: dict, key, value) -> None:
        if len(cache) >= self.max_cache:
            cache.clear()
        cache[key] = value

    def add(self, a: Edge, b: Edge) -> Edge:
        wa, x = a
        wb, y = b
        if wa == 0:
            return b
        if wb == 0:
            return a
        if x is y:
            v = self.cval(wa + wb)
            return ZERO if v == 0 else Edge(v, x)
        if x.height != y.height or len(x.edges) != len(y.edges):
            raise DDError("add: operands have different shapes")
        if id(x) > id(y):
            wa, x, wb, y = wb, y, wa, x
        ratio = self.cval(wb / wa)
        if ratio == 0:
            return Edge(wa, x)
        key = (x, y, ratio)
        r = self._add_c.get(key)
        if r is None:
            scale = self.scale
            kids = tuple(
                self.add(ex, scale(ey, ratio)) for ex, ey in zip(x.edges, y.edges)
            )
            r = self.make_node(x.height, kids)
            self._cache_put(self._add_c, key, r)
        return self.scale(r, wa)

    def neg(self, a: Edge) -> Edge:
        return self.scale(a, -1)

    def sub(self, a: Edge, b: Edge) -> Edge:
        return self.add(a, self.scale(b, -1))

    def mul(self, a: Edge, b: Edge) -> Edge:
        """Matrix-matrix or matrix-vector product ``a @ b``."""
        wa, x = a
        wb, y = b
        if x.height and len(x.edges) != 4:
            raise DDError("mul: left operand must be a matrix")
        if wa == 0 or wb == 0:
            return ZERO
        if x.height != y.height:
            raise DDError("mul: operands have different level counts")
        return self.scale(self._mul(x, y), wa * wb)

    def _mul(self, x: Node, y: Node) -> Edge:
        if x.ident:
            return Edge(1 + 0j, y)
        if y.ident:
            return Edge(1 + 0j, x)
        key = (x, y)
        r = self._mul_c.get(key)
        if r is not None:
            return r
        xe = x.edges
        ye = y.edges
        mul = self._mul
        scale = self.scale
        add = self.add
        out = []
        if len(ye) == 4:
            for row in (0, 2):
                for col in (0, 1):
                    acc = ZERO
                    for k in (0, 1):
                        w1, n1 = xe[row + k]
                        w2, n2 = ye[2 * k + col]
                        if w1 == 0 or w2 == 0:
                            continue
                        acc = add(acc, scale(mul(n1, n2), w1 * w2))
                    out.append(acc)
        else:
            for row in (0, 2):
                acc = ZERO
                for k in (0, 1):
                    w1, n1 = xe[row + k]
                    w2, n2 = ye[k]
                    if w1 == 0 or w2 == 0:
                        continue
                    acc = add(acc, scale(mul(n1, n2), w1 * w2))
                out.append(acc)
        r = self.make_node(x.height, out)
        self._cache_put(self._mul_c, key, r)
        return r

    def kron(self, a: Edge, b: Edge) -> Edge:
        """Kronecker product with ``a`` on the upper (more significant) levels."""
        wa, x = a
        wb, y = b
        if x.height and y.height and len(x.edges) != len(y.edges):
            raise DDError("kron: cannot mix vectors and matrices")
        if wa == 0 or wb == 0:
            return ZERO
        return self.scale(self._kron(x, y), wa * wb)

    def _kron(self, x: Node, y: Node) -> Edge:
        if x.height == 0:
            return Edge(1 + 0j, y)
        key = (x, y)
        r = self._kron_c.get(key)
        if r is not None:
            return r
        kids = tuple(
            ZERO if w == 0 else self.scale(self._kron(n, y), w) for w, n in x.edges
        )
        r = self.make_node(x.height + y.height, kids)
        self._cache_put(self._kron_c, key, r)
        return r

    def adjoint(self, a: Edge) -> Edge:
        """Conjugate transpose of a matrix edge."""
        w, x = a
        if x.height and len(x.edges) != 4:
            raise DDError("adjoint: operand must be a matrix")
        if w == 0:
            return ZERO
        return self.scale(self._adj(x), w.conjugate())

    def _adj(self, x: Node) -> Edge:
        if x.ident:
            return Edge(1 + 0j, x)
        r = self._adj_c.get(x)
        if r is not None:
            return r
        e = x.edges
        kids = []
        for i in (0, 2, 1, 3):
            w, n = e[i]
            kids.append(ZERO if w == 0 else self.scale(self._adj(n), w.conjugate()))
        r = self.make_node(x.height, kids)
        self._cache_put(self._adj_c, x, r)
        return r

    # ------------------------------------------------------------------
    # inspection

    def max_abs(self, a: Edge) -> float:
        """Largest entry magnitude of the represented vector or matrix."""
        w, x = a
        if w == 0:
            return 0.0
        return abs(w) * self._max_norm(x)

    def _max_norm(self, x: Node) -> float:
        if x.height == 0:
            return 1.0
        r = self._norm_c.get(x)
        if r is None:
            r = max(abs(w) * self._max_norm(n) for w, n in x.edges if w != 0)
            self._cache_put(self._norm_c, x, r)
        return r

    def max_abs_diff(self, a: Edge, b: Edge) -> float:
        """Sup-norm of the entrywise difference ``a - b``."""
        if a == b:
            return 0.0
        return self.max_abs(self.sub(a, b))

    def to_dense(self, a: Edge, levels: int | None = None, matrix: bool | None = None,
                 cap: int = DENSE_LEVEL_CAP) -> np.ndarray:
        """Dense array of ``a``.

        ``levels`` and ``matrix`` are only consulted when the edge itself does
        not carry a shape, i.e. for the zero edge and for scalars.
        """
        w, x = a
        if x.height:
            if levels is not None and levels != x.height:
                raise DDError(f"edge has {x.height} levels, not {levels}")
            levels = x.height
            matrix = len(x.edges) == 4
        else:
            levels = levels or 0
            if matrix is None:
                if levels:
                    raise DDError("zero edge needs an explicit matrix flag")
                matrix = True
        if levels > cap:
            raise DDError(f"{levels} levels exceed the dense cap of {cap}")
        dim = 1 << levels
        if w == 0:
            return np.zeros((dim, dim) if matrix else dim, dtype=complex)
        if x.height == 0:
            if levels:
                raise DDError("scalar edge has no levels")
            return np.full((1, 1) if matrix else 1, w, dtype=complex)
        memo: dict[int, np.ndarray] = {}
        if matrix:
            return w * self._dense_matrix(x, memo)
        return w * self._dense_vector(x, memo)

    def _dense_matrix(self, x: Node, memo: dict) -> np.ndarray:
        if x.height == 0:
            return np.ones((1, 1), dtype=complex)
        r = memo.get(id(x))
        if r is not None:
            return r
        half = 1 << (x.height - 1)
        blocks = [
            w * self._dense_matrix(n, memo) if w != 0 else np.zeros((half, half), dtype=complex)
            for w, n in x.edges
        ]
        r = np.block([[blocks[0], blocks[1]], [blocks[2], blocks[3]]])
        memo[id(x)] = r
        return r

    def _dense_vector(self, x: Node, memo: dict) -> np.ndarray:
        if x.height == 0:
            return np.ones(1, dtype=complex)
        r = memo.get(id(x))
        if r is not None:
            return r
        half = 1 << (x.height - 1)
        parts = [
            w * self._dense_vector(n, memo) if w != 0 else np.zeros(half, dtype=complex)
            for w, n in x.edges
        ]
        r = np.concatenate(parts)
        memo[id(x)] = r
        return r

    def size(self, a: Edge) -> int:
        """Number of distinct non-terminal nodes reachable from ``a``."""
        seen: set[int] = set()
        stack = [a[1]]
        while stack:
            x = stack.pop()
            if x.height == 0 or id(x) in seen:
                continue
            seen.add(id(x))
            stack.extend(n for w, n in x.edges if w != 0)
        return len(seen)

    def dump(self, a: Edge) -> str:
        """Deterministic text form of a diagram for golden comparisons."""
        w, root = a
        ids: dict[int, int] = {}
        order: list[Node] = []

        def visit(x: Node) -> None:
            if x.height == 0 or id(x) in ids:
                return
            ids[id(x)] = len(order)
            order.append(x)
            for cw, n in x.edges:
                if cw != 0:
                    visit(n)

        visit(root)

        def ref(cw: complex, n: Node) -> str:
            if cw == 0:
                return "0"
            target = "T" if n.height == 0 else f"n{ids[id(n)]}"
            return f"({cw.real:.17g},{cw.imag:.17g})*{target}"

        lines = [f"root {ref(w, root)}"]
        for x in order:
            level = root.height - x.height
            kids = " ".join(ref(cw, n) for cw, n in x.edges)
            lines.append(f"n{ids[id(x)]} level={level} {kids}")
        return "\n".join(lines)

    def adopt(self, a: Edge) -> Edge:
        """Rebuild a diagram owned by another manager inside this one."""
        memo: dict[int, Edge] = {}

        def rebuild(x: Node) -> Edge:
            if x.height == 0:
                return ONE
            r = memo.get(id(x))
            if r is None:
                kids = tuple(ZERO if w == 0 else self.scale(rebuild(n), w) for w, n in x.edges)
                r = self.make_node(x.height, kids)
                memo[id(x)] = r
            return r

        w, x = a
        if w == 0:
            return ZERO
        return self.scale(rebuild(x), w)

    # ------------------------------------------------------------------
    # housekeeping

    def clear_caches(self) -> None:
        for cache in (self._mul_c, self._add_c, self._kron_c, self._adj_c,
                      self._norm_c, self._ins_c):
            cache.clear()

    def collect(self, roots: Iterable[Edge]) -> None:
        """Drop every table entry not reachable from ``roots``.

        Edges outside ``roots`` that the caller still holds stay valid as
        values but lose reference-identity with future constructions.
        """
        keep: dict[tuple, Node] = {}
        weights: list[complex] = []
        stack = [e[1] for e in roots]
        stack.extend(e[1] for e in self._ident_c.values())
        for e in roots:
            weights.append(e[0])
        while stack:
            x = stack.pop()
            if x.height == 0 or x.edges in keep:
                continue
            keep[x.edges] = x
            for w, n in x.edges:
                if w != 0:
                    weights.append(w)
                    stack.append(n)
        self._unique = keep
        self.clear_caches()
        self._ctable = {}
        self._seen = {}
        self._seed_ctable()
        tol = self.tol
        for w in weights:
            if w == 0 or w in self._seen:
                continue
            key = (math.floor(w.real / tol), math.floor(w.imag / tol))
            self._ctable.setdefault(key, []).append(w)
            self._seen[w] = w

    def stats(self) -> dict[str, int]:
        return {
            "unique_nodes": len(self._unique),
            "nodes_created": self.nodes_created,
            "complex_values": sum(len(b) for b in self._ctable.values()),
            "cache_entries": sum(len(c) for c in (self._mul_c, self._add_c, self._kron_c,
                                                  self._adj_c, self._norm_c, self._ins_c)),
        }


def _log2_exact(dim: int) -> int:
    if dim < 1 or dim & (dim - 1):
        raise DDError(f"dimension {dim} is not a power of two")
    return dim.bit_length() - 1
