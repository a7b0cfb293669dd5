"""Command-line entry point.

Exit codes: 0 equivalent / success, 1 inequivalent, 2 resource limit,
64 usage error, 65 unparsable input, 66 unreadable input, 73 unwritable output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import qasm
from .bench import BenchConfig, BenchConfigError, default_config, dumps_aggregates, records_csv, run_suite
from .circuit import CircuitError
from .engine import Budget, Outcome, check_equivalence, compare_fingerprints, fingerprint
from .mutate import mutate
from .opt import optimize
from .oracle import oracle_equivalent
from .randgen import GenProfile, generate

EXIT_EQUIVALENT = 0
EXIT_INEQUIVALENT = 1
EXIT_RESOURCE = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65
EXIT_NOINPUT = 66
EXIT_CANTCREAT = 73


class UsageError(Exception):
    pass


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_NOINPUT) from exc


def _load(path: str):
    text = _read_text(path)
    try:
        return qasm.parse(text)
    except (qasm.QasmError, CircuitError) as exc:
        raise CliError(f"{path}:{exc}", EXIT_DATAERR) from exc


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_CANTCREAT) from exc


def _cmd_check(args) -> int:
    a, b = _load(args.a), _load(args.b)
    if a.n_qubits != b.n_qubits:
        raise CliError(f"width mismatch: {a.n_qubits} vs {b.n_qubits}", EXIT_DATAERR)
    budget = Budget(timeout_s=args.timeout, max_nodes=args.max_nodes)
    verdict = check_equivalence(a, b, args.tol, budget, jobs=args.jobs, kernel_tol=args.kernel_tol)
    print(json.dumps(verdict.to_json()))
    return {
        Outcome.EQUIVALENT: EXIT_EQUIVALENT,
        Outcome.INEQUIVALENT: EXIT_INEQUIVALENT,
        Outcome.RESOURCE_LIMIT: EXIT_RESOURCE,
    }[verdict.outcome]


def _cmd_fingerprint(args) -> int:
    c = _load(args.a)
    budget = Budget(timeout_s=args.timeout)
    fp = fingerprint(c, budget)
    if args.compare:
        other = _load(args.compare)
        if other.n_qubits != c.n_qubits:
            raise CliError("width mismatch", EXIT_DATAERR)
        fp1 = fingerprint(other, budget, manager=fp.manager)
        if not (fp.complete and fp1.complete):
            print(json.dumps({"equal": None, "complete": False}))
            return EXIT_RESOURCE
        equal = compare_fingerprints(fp, fp1, args.tol)
        print(json.dumps({"equal": equal, "complete": True}))
        return EXIT_EQUIVALENT if equal else EXIT_INEQUIVALENT
    rows = []
    for q, op in enumerate(fp):
        if op is None:
            rows.append({"qubit": q, "support": None})
            continue
        row = {"qubit": q, "support": list(op.support), "nodes": fp.manager.size(op.mat)}
        if op.width <= args.dense_max:
            m = op.dense(fp.manager)
            row["matrix"] = [[[z.real, z.imag] for z in r] for r in m.tolist()]
        rows.append(row)
    print(json.dumps({"complete": fp.complete, "projectors": rows}))
    return EXIT_EQUIVALENT if fp.complete else EXIT_RESOURCE


def _cmd_gen(args) -> int:
    try:
        profile = GenProfile(args.qubits, args.depth, args.seed, args.p_h, args.p_s,
                             args.p_t, args.p_cnot, args.p_i)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sys.stdout.write(qasm.emit(generate(profile)))
    return 0


def _cmd_opt(args) -> int:
    sys.stdout.write(qasm.emit(optimize(_load(args.a), args.passes)))
    return 0


def _cmd_mutate(args) -> int:
    c = _load(args.a)
    try:
        mutant, injected = mutate(c, args.variant, args.seed)
    except (ValueError, CircuitError) as exc:
        raise UsageError(str(exc)) from exc
    if not injected:
        print(f"note: no site for {args.variant}; circuit unchanged", file=sys.stderr)
    sys.stdout.write(qasm.emit(mutant))
    return 0


def _cmd_oracle(args) -> int:
    a, b = _load(args.a), _load(args.b)
    try:
        eq = oracle_equivalent(a, b, args.tol)
    except CircuitError as exc:
        raise CliError(str(exc), EXIT_DATAERR) from exc
    print(json.dumps({"equivalent": eq, "tolerance": args.tol}))
    return EXIT_EQUIVALENT if eq else EXIT_INEQUIVALENT


def _cmd_bench(args) -> int:
    if args.config:
        try:
            data = json.loads(_read_text(args.config))
        except json.JSONDecodeError as exc:
            raise CliError(f"{args.config}: {exc}", EXIT_DATAERR) from exc
        try:
            cfg = BenchConfig.from_dict(data)
        except BenchConfigError as exc:
            raise CliError(f"{args.config}: {exc}", EXIT_DATAERR) from exc
    else:
        cfg = default_config()
    if args.jobs is not None:
        cfg.jobs = args.jobs
    result = run_suite(cfg)
    _write(args.out, records_csv(result.records))
    summary = args.summary or str(Path(args.out).with_suffix(".json"))
    text = dumps_aggregates(result, cfg)
    _write(summary, text)
    print(json.dumps(result.aggregates_json()["overall"]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pbec", description="Quantum circuit equivalence checking by local projections.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check", help="decide equivalence of two QASM circuits")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--tol", type=float, default=1e-15)
    s.add_argument("--kernel-tol", type=float, default=1e-15)
    s.add_argument("--timeout", type=float, default=100.0)
    s.add_argument("--max-nodes", type=int, default=1 << 22)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=_cmd_check)

    s = sub.add_parser("fingerprint", help="local output-state projectors of a circuit")
    s.add_argument("a")
    s.add_argument("--compare", metavar="B")
    s.add_argument("--tol", type=float, default=1e-15)
    s.add_argument("--timeout", type=float, default=100.0)
    s.add_argument("--dense-max", type=int, default=3,
                   help="include dense matrices for supports up to this width")
    s.set_defaults(func=_cmd_fingerprint)

    s = sub.add_parser("gen", help="random layered Clifford+T circuit as QASM")
    s.add_argument("--qubits", type=int, required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--p-h", type=float, default=0.35)
    s.add_argument("--p-s", type=float, default=0.35)
    s.add_argument("--p-t", type=float, default=0.20)
    s.add_argument("--p-cnot", type=float, default=0.10)
    s.add_argument("--p-i", type=float, default=0.0)
    s.set_defaults(func=_cmd_gen)

    s = sub.add_parser("opt", help="peephole-optimize a QASM circuit")
    s.add_argument("a")
    s.add_argument("--passes", type=int, default=64)
    s.set_defaults(func=_cmd_opt)

    s = sub.add_parser("mutate", help="inject an inequivalence")
    s.add_argument("a")
    s.add_argument("--variant", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_mutate)

    s = sub.add_parser("oracle", help="dense ground-truth equivalence (small circuits)")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=_cmd_oracle)

    s = sub.add_parser("bench", help="run the benchmark grid")
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.add_argument("--summary", help="aggregates JSON path (default: OUT with .json suffix)")
    s.add_argument("--jobs", type=int)
    s.set_defaults(func=_cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", None) is not None and args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
