"""Seeded layer-by-layer random Clifford+T circuits on a line of qubits.

The pseudo-random stream is xoshiro256** seeded through splitmix64, and a
uniform real in [0, 1) is the top 53 bits of one output scaled by 2**-53.
Both are pinned so a corpus can be regenerated bit-for-bit anywhere.

Per layer the scan over qubit positions ``q = 0, 1, ...`` draws, in order:

1. if ``q < n - 1``: ``u``; ``u < p_cnot`` emits ``CX(q, q+1)`` and advances by two;
2. ``u``; ``u < p_i`` leaves ``q`` idle and advances by one;
3. ``u``; picks H, S or T by cumulative ``(p_h, p_s, p_t) / (p_h + p_s + p_t)``
   and advances by one.

Draw 2 is made even when ``p_i == 0`` so the stream layout does not depend on
the profile.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, Gate, GateKind

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256:
    """xoshiro256** generator."""

    def __init__(self, seed: int) -> None:
        sm = seed & _MASK
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self.s = s

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
        t = (s[1] << 17) & _MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection on the top bits."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        bits = max(1, (n - 1).bit_length())
        while True:
            r = self.next_u64() >> (64 - bits)
            if r < n:
                return r


@dataclass(frozen=True)
class GenProfile:
    n_qubits: int
    depth: int
    seed: int = 0
    p_h: float = 0.35
    p_s: float = 0.35
    p_t: float = 0.20
    p_cnot: float = 0.10
    p_i: float = 0.0

    def __post_init__(self) -> None:
        for name in ("p_h", "p_s", "p_t", "p_cnot", "p_i"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} outside [0, 1]")
        if self.p_h + self.p_s + self.p_t <= 0:
            raise ValueError("p_h + p_s + p_t must be positive")
        if self.n_qubits < 1 or self.depth < 0:
            raise ValueError("need n_qubits >= 1 and depth >= 0")


def generate(profile: GenProfile) -> Circuit:
    n = profile.n_qubits
    rng = Xoshiro256(profile.seed)
    total = profile.p_h + profile.p_s + profile.p_t
    cut_h = profile.p_h / total
    cut_s = (profile.p_h + profile.p_s) / total
    gates: list[Gate] = []
    for _ in range(profile.depth):
        q = 0
        while q < n:
            if q < n - 1 and rng.random() < profile.p_cnot:
                gates.append(Gate(GateKind.CX, (q, q + 1)))
                q += 2
                continue
            if rng.random() < profile.p_i:
                q += 1
                continue
            u = rng.random()
            if u < cut_h:
                kind = GateKind.H
            elif u < cut_s:
                kind = GateKind.S
            else:
                kind = GateKind.T
            gates.append(Gate(kind, (q,)))
            q += 1
    return Circuit(n, tuple(gates))
