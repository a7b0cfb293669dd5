"""Benchmark harness: generated circuit pairs, timed checks, rate metrics.

Every original circuit yields one equivalent pair (original vs. its peephole
optimization) and one pair per configured mutation variant.  Pairs travel
through QASM text so the conversion step is part of the measured time.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from . import qasm
from .engine import Budget, Outcome, check_equivalence
from .mutate import VARIANTS, mutate, shift_delta
from .opt import optimize
from .oracle import oracle_equivalent
from .randgen import GenProfile, generate, splitmix64

log = logging.getLogger(__name__)

CSV_HEADER = ("pair_id", "n", "depth", "kind", "variant", "outcome",
              "elapsed_s", "convert_s", "check_s")


class BenchConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    n: int
    depth: int
    pairs: int


@dataclass
class BenchConfig:
    grid: list[Cell]
    variants: list[str] = field(default_factory=lambda: ["gm"])
    tol: float = 1e-15
    timeout_s: float = 100.0
    seed: int = 0
    jobs: int = 1
    oracle_max_qubits: int = 10
    equivalent: bool = True

    def validate(self) -> None:
        if not self.grid:
            raise BenchConfigError("grid is empty")
        for cell in self.grid:
            if cell.n < 1 or cell.depth < 0 or cell.pairs < 0:
                raise BenchConfigError(f"invalid grid cell {cell}")
        for v in self.variants:
            if v not in VARIANTS and shift_delta(v) is None:
                raise BenchConfigError(f"unknown variant {v!r}")
        if not self.tol > 0:
            raise BenchConfigError("tol must be positive")
        if not self.timeout_s > 0:
            raise BenchConfigError("timeout_s must be positive")
        if self.jobs < 1:
            raise BenchConfigError("jobs must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> BenchConfig:
        if not isinstance(data, dict):
            raise BenchConfigError("config must be a JSON object")
        known = {"grid", "variants", "tol", "timeout_s", "seed", "jobs",
                 "oracle_max_qubits", "equivalent"}
        extra = set(data) - known
        if extra:
            raise BenchConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            grid = [Cell(int(c["n"]), int(c["depth"]), int(c["pairs"])) for c in data["grid"]]
            kwargs = {k: data[k] for k in known - {"grid"} if k in data}
            cfg = cls(grid=grid, **kwargs)
        except (KeyError, TypeError, ValueError) as exc:
            raise BenchConfigError(f"malformed config: {exc}") from exc
        cfg.variants = list(cfg.variants)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)


def default_config() -> BenchConfig:
    """A small grid that finishes in seconds."""
    grid = [Cell(n, d, 5) for n in (4, 8) for d in (1, 2, 4)]
    return BenchConfig(grid=grid, variants=["gm", "flip", "shift7"], timeout_s=100.0)


@dataclass
class BenchRecord:
    pair_id: str
    n_qubits: int
    depth: int
    input_kind: str
    variant: str
    outcome: str
    elapsed: float
    convert_time: float
    check_time: float

    def csv_row(self) -> list[str]:
        return [self.pair_id, str(self.n_qubits), str(self.depth), self.input_kind,
                self.variant, self.outcome, f"{self.elapsed:.6f}",
                f"{self.convert_time:.6f}", f"{self.check_time:.6f}"]


@dataclass
class AggregateStats:
    runs: int
    completed: int
    correct: int
    incorrect_nontimeout: int

    @property
    def completion(self) -> float | None:
        return self.completed / self.runs if self.runs else None

    @property
    def correctness(self) -> float | None:
        return self.correct / self.completed if self.completed else None

    @property
    def success(self) -> float | None:
        return self.correct / self.runs if self.runs else None

    @classmethod
    def from_records(cls, records: Iterable[BenchRecord]) -> AggregateStats:
        outcomes = [r.outcome for r in records]
        return cls(
            runs=len(outcomes),
            completed=sum(o != "timeout" for o in outcomes),
            correct=outcomes.count("correct"),
            incorrect_nontimeout=outcomes.count("incorrect"),
        )

    def to_json(self) -> dict:
        def pct(x):
            return "n/a" if x is None else round(100 * x, 2)

        return {
            "runs": self.runs,
            "completed": self.completed,
            "correct": self.correct,
            "incorrect_nontimeout": self.incorrect_nontimeout,
            "completion_pct": pct(self.completion),
            "correctness_pct": pct(self.correctness),
            "success_pct": pct(self.success),
        }


@dataclass(frozen=True)
class Instance:
    pair_id: str
    n: int
    depth: int
    kind: str
    variant: str
    text_a: str
    text_b: str
    expected_equivalent: bool


def _derive_seed(*parts: int) -> int:
    s = 0
    for p in parts:
        _, s = splitmix64(s ^ (p & ((1 << 64) - 1)))
    return s


def build_instances(cfg: BenchConfig) -> list[Instance]:
    out = []
    for cell in cfg.grid:
        for k in range(cell.pairs):
            seed = _derive_seed(cfg.seed, cell.n, cell.depth, k)
            original = generate(GenProfile(cell.n, cell.depth, seed=seed))
            text_a = qasm.emit(original)
            stem = f"n{cell.n:03d}-d{cell.depth:03d}-p{k:04d}"
            if cfg.equivalent:
                out.append(Instance(f"{stem}-opt", cell.n, cell.depth, "equivalent", "opt",
                                    text_a, qasm.emit(optimize(original)), True))
            for j, variant in enumerate(cfg.variants):
                mutant, injected = mutate(original, variant, _derive_seed(seed, j + 1))
                kind = "inequivalent" if injected else "equivalent"
                out.append(Instance(f"{stem}-{variant}", cell.n, cell.depth, kind, variant,
                                    text_a, qasm.emit(mutant), not injected))
    return out


def run_instance(inst: Instance, tol: float, timeout_s: float, oracle_max_qubits: int) -> BenchRecord:
    start = time.monotonic()
    a = qasm.parse(inst.text_a)
    b = qasm.parse(inst.text_b)
    convert = time.monotonic() - start
    remaining = max(timeout_s - convert, 0.0)
    verdict = check_equivalence(a, b, tol, Budget(timeout_s=remaining))
    check = verdict.elapsed_seconds
    expected = inst.expected_equivalent
    if inst.n <= oracle_max_qubits:
        truth = oracle_equivalent(a, b)
        if truth != expected:
            raise RuntimeError(f"{inst.pair_id}: construction label {expected} "
                               f"contradicts the dense oracle")
    if verdict.outcome is Outcome.RESOURCE_LIMIT:
        outcome = "timeout"
    elif verdict.equivalent == expected:
        outcome = "correct"
    else:
        outcome = "incorrect"
    return BenchRecord(inst.pair_id, inst.n, inst.depth, inst.kind, inst.variant, outcome,
                       convert + check, convert, check)


def _run_star(args) -> BenchRecord:
    return run_instance(*args)


@dataclass
class SuiteResult:
    records: list[BenchRecord]
    overall: AggregateStats
    groups: dict[tuple[int, str], AggregateStats]

    def aggregates_json(self) -> dict:
        return {
            "overall": self.overall.to_json(),
            "by_n_kind": [
                {"n": n, "kind": kind, **stats.to_json()}
                for (n, kind), stats in sorted(self.groups.items())
            ],
        }


def aggregate(records: Sequence[BenchRecord]) -> SuiteResult:
    groups: dict[tuple[int, str], list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.n_qubits, r.input_kind), []).append(r)
    return SuiteResult(
        list(records),
        AggregateStats.from_records(records),
        {k: AggregateStats.from_records(v) for k, v in groups.items()},
    )


def run_suite(cfg: BenchConfig, progress=None) -> SuiteResult:
    cfg.validate()
    instances = build_instances(cfg)
    args = [(inst, cfg.tol, cfg.timeout_s, cfg.oracle_max_qubits) for inst in instances]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(_run_star, args, chunksize=4))
    else:
        records = []
        for a in args:
            records.append(run_instance(*a))
            if progress is not None:
                progress(records[-1])
    records.sort(key=lambda r: r.pair_id)
    return aggregate(records)


def records_csv(records: Sequence[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def dumps_aggregates(result: SuiteResult, cfg: BenchConfig) -> str:
    payload = {"config": cfg.to_dict(), **result.aggregates_json()}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
