"""OpenQASM 2.0 subset: parser to :class:`Circuit` and serializer back.

Accepted statements: the ``OPENQASM 2.0;`` header, ``include``, ``qreg``,
``creg`` (declaration only), ``barrier`` (ignored) and applications of the
builtin gates ``h s sdg t tdg x y z sx sxdg rz rx ry u1 cx cz swap ccx``.
``ccx`` is expanded into a fixed 15-gate Clifford+T template.  Measurement,
reset, conditionals, ``gate``/``opaque`` definitions are rejected.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .circuit import Circuit, Gate, GateKind


class QasmError(ValueError):
    """Base class for front-end diagnostics; carries a 1-based position."""

    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        self.message = message
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


class QasmSyntaxError(QasmError):
    pass


class QasmUnsupportedError(QasmError):
    pass


class QasmRangeError(QasmError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+|//[^\n]*)
  | (?P<nl>\n)
  | (?P<real>(?:\d+\.\d*|\.\d+)(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+)
  | (?P<int>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>"[^"\n]*")
  | (?P<op>->|==|[\[\](){};,+\-*/^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QasmSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_UNSUPPORTED = {
    "measure": "measurement is not supported; equivalence is defined on unitaries",
    "reset": "reset is not supported",
    "if": "classically conditioned operations are not supported",
    "gate": "user-defined gates are not supported",
    "opaque": "opaque gates are not supported",
}

_BUILTIN = {k.value: k for k in GateKind}


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.i = 0
        self.qregs: dict[str, tuple[int, int]] = {}
        self.cregs: set[str] = set()
        self.n_qubits = 0
        self.gates: list[Gate] = []

    # token helpers
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None) -> QasmSyntaxError:
        tok = tok or self.tok
        return QasmSyntaxError(msg, tok.line, tok.column)

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind in ("str",):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {what}, found {found!r}")
        return self.advance()

    # grammar
    def parse(self) -> Circuit:
        if self.tok.text == "OPENQASM":
            self.advance()
            version = self.advance()
            if version.text not in ("2.0", "2"):
                raise QasmUnsupportedError(
                    f"only OpenQASM 2.0 is supported, got {version.text!r}", version.line, version.column
                )
            self.expect(";")
        while self.tok.kind != "eof":
            self.statement()
        return Circuit(self.n_qubits, tuple(self.gates))

    def statement(self) -> None:
        tok = self.tok
        if tok.kind != "id":
            raise self.error(f"expected a statement, found {tok.text!r}")
        word = tok.text
        if word in _UNSUPPORTED:
            raise QasmUnsupportedError(_UNSUPPORTED[word], tok.line, tok.column)
        if word == "OPENQASM":
            raise self.error("OPENQASM header must come first")
        if word == "include":
            self.advance()
            self.expect_kind("str", "a quoted file name")
            self.expect(";")
            return
        if word in ("qreg", "creg"):
            self.advance()
            name = self.expect_kind("id", "a register name")
            self.expect("[")
            size = self.expect_kind("int", "a register size")
            self.expect("]")
            self.expect(";")
            if name.text in self.qregs or name.text in self.cregs:
                raise self.error(f"register {name.text!r} redeclared", name)
            if word == "qreg":
                self.qregs[name.text] = (self.n_qubits, int(size.text))
                self.n_qubits += int(size.text)
            else:
                self.cregs.add(name.text)
            return
        if word == "barrier":
            self.advance()
            self.arguments()
            self.expect(";")
            return
        if word == "ccx":
            self.advance()
            args = self.arguments()
            self.expect(";")
            for a, b, c in self.broadcast(args, 3, tok):
                self.gates.extend(ccx_template(a, b, c))
            return
        kind = _BUILTIN.get(word)
        if kind is None:
            raise QasmUnsupportedError(f"unknown gate {word!r}", tok.line, tok.column)
        self.advance()
        angle = None
        if self.tok.text == "(":
            self.advance()
            angle = self.expression()
            self.expect(")")
            if not kind.parametric:
                raise self.error(f"gate {word!r} takes no parameter", tok)
        elif kind.parametric:
            raise self.error(f"gate {word!r} needs one angle parameter", tok)
        args = self.arguments()
        self.expect(";")
        for qubits in self.broadcast(args, kind.arity, tok):
            self.gates.append(Gate(kind, qubits, angle))

    def arguments(self) -> list[list[int]]:
        args = [self.argument()]
        while self.tok.text == ",":
            self.advance()
            args.append(self.argument())
        return args

    def argument(self) -> list[int]:
        name = self.expect_kind("id", "a qubit argument")
        if name.text in self.cregs:
            raise QasmUnsupportedError(
                f"classical register {name.text!r} used as a gate operand", name.line, name.column
            )
        if name.text not in self.qregs:
            raise self.error(f"undeclared register {name.text!r}", name)
        start, size = self.qregs[name.text]
        if self.tok.text != "[":
            return list(range(start, start + size))
        self.advance()
        idx = self.expect_kind("int", "a qubit index")
        self.expect("]")
        k = int(idx.text)
        if k >= size:
            raise QasmRangeError(
                f"index {k} out of range for {name.text}[{size}]", idx.line, idx.column
            )
        return [start + k]

    def broadcast(self, args: list[list[int]], arity: int, tok: Token) -> list[tuple[int, ...]]:
        if len(args) != arity:
            raise self.error(f"{tok.text!r} takes {arity} argument(s), got {len(args)}", tok)
        sizes = {len(a) for a in args if len(a) != 1}
        if len(sizes) > 1:
            raise self.error("register arguments have different sizes", tok)
        width = sizes.pop() if sizes else 1
        out = []
        for j in range(width):
            qubits = tuple(a[0] if len(a) == 1 else a[j] for a in args)
            if len(set(qubits)) != len(qubits):
                raise self.error(f"repeated qubit in {tok.text!r} arguments", tok)
            out.append(qubits)
        return out

    # angle expressions: sum := term (('+'|'-') term)*, term := unary (('*'|'/') unary)*
    def expression(self) -> float:
        value = self.term()
        while self.tok.text in ("+", "-"):
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> float:
        value = self.unary()
        while self.tok.text in ("*", "/"):
            op = self.advance()
            rhs = self.unary()
            if op.text == "*":
                value *= rhs
            elif rhs == 0:
                raise self.error("division by zero in angle", op)
            else:
                value /= rhs
        return value

    def unary(self) -> float:
        if self.tok.text == "-":
            self.advance()
            return -self.unary()
        if self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.atom()

    def atom(self) -> float:
        tok = self.tok
        if tok.kind in ("int", "real"):
            self.advance()
            return float(tok.text)
        if tok.text == "pi":
            self.advance()
            return math.pi
        if tok.text == "(":
            self.advance()
            value = self.expression()
            self.expect(")")
            return value
        raise self.error(f"expected an angle expression, found {tok.text or 'end of input'!r}")


def ccx_template(a: int, b: int, c: int) -> list[Gate]:
    """Toffoli with controls ``a``, ``b`` and target ``c`` in Clifford+T."""
    K = GateKind
    seq = [
        (K.H, c), (K.CX, b, c), (K.TDG, c), (K.CX, a, c), (K.T, c), (K.CX, b, c),
        (K.TDG, c), (K.CX, a, c), (K.T, b), (K.T, c), (K.H, c), (K.CX, a, b),
        (K.T, a), (K.TDG, b), (K.CX, a, b),
    ]
    return [Gate(kind, tuple(qs)) for kind, *qs in seq]


def parse(text: str) -> Circuit:
    return _Parser(text).parse()


def parse_file(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def format_angle(x: float) -> str:
    return format(x, ".17g")


def emit(c: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.n_qubits}];"]
    for g in c.gates:
        args = ",".join(f"q[{q}]" for q in g.qubits)
        if g.kind.parametric:
            lines.append(f"{g.kind.value}({format_angle(g.angle)}) {args};")
        else:
            lines.append(f"{g.kind.value} {args};")
    return "\n".join(lines) + "\n"
