"""Scalar expressions in chart coordinates.

Grammar (whitespace-insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right-associative, binds tightest
    atom    := NUMBER | COORD | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := exp | log | sin | cos | sinh | cosh | sqrt

Numbers are decimal literals with an optional exponent (``1.5``, ``.5``,
``2e-3``).  There is no implicit multiplication and no named constants, so
``e`` must be written ``exp(1)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

from . import jet as _jet
from .errors import DomainError, ExprSyntaxError, UnknownIdentifier
from .jet import Jet

__all__ = [
    "Number",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "Expr",
    "parse",
    "evaluate",
    "evaluate_float",
    "free_variables",
    "to_text",
    "FUNCTION_NAMES",
]

FUNCTION_NAMES = frozenset(_jet.FUNCTIONS)


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Number, Var, Neg, BinOp, Call]


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


class _Parser:
    def __init__(self, text: str, coordinates):
        self.text = text
        self.coordinates = set(coordinates)
        self.tokens = []  # (kind, value, char_pos)
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                self.fail(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            if kind != "ws":
                self.tokens.append((kind, m.group(), pos))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def byte_offset(self, pos: int) -> int:
        return len(self.text[:pos].encode("utf-8"))

    def fail(self, message: str, pos: int):
        raise ExprSyntaxError(message, self.text, self.byte_offset(pos))

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind == "end":
            what = "end of input" if kind == "end" else repr(val)
            self.fail(f"expected {value!r}, found {what}", pos)

    def parse(self) -> Expr:
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            self.fail(f"unexpected {val!r}", pos)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "num":
            value = float(val)
            if not math.isfinite(value):
                self.fail(f"numeric literal {val!r} out of range", pos)
            return Number(value)
        if kind == "ident":
            if val in FUNCTION_NAMES and val not in self.coordinates:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            if val in self.coordinates:
                return Var(val)
            raise UnknownIdentifier(val, self.text, self.byte_offset(pos))
        if val == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        self.fail(f"expected a number, coordinate, function or '(', found {what}", pos)


def parse(text: str, coordinates) -> Expr:
    """Parse ``text`` into an expression tree over the given coordinate names."""
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    if not text.strip():
        raise ExprSyntaxError("empty expression", text, 0)
    return _Parser(text, coordinates).parse()


def free_variables(node: Expr) -> frozenset[str]:
    if isinstance(node, Var):
        return frozenset([node.name])
    if isinstance(node, Number):
        return frozenset()
    if isinstance(node, Neg):
        return free_variables(node.operand)
    if isinstance(node, Call):
        return free_variables(node.arg)
    return free_variables(node.left) | free_variables(node.right)


# -- printing ---------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    return _ATOM_PREC


def _wrap(node: Expr, minimum: int) -> str:
    s = to_text(node)
    return f"({s})" if _prec(node) < minimum else s


def to_text(node: Expr) -> str:
    """Render with the minimal parentheses that re-parse to the same tree."""
    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _NEG_PREC)
    p = _PREC[node.op]
    if node.op == "^":
        return f"{_wrap(node.left, _ATOM_PREC)}^{_wrap(node.right, _NEG_PREC)}"
    return f"{_wrap(node.left, p)} {node.op} {_wrap(node.right, p + 1)}"


# -- evaluation -------------------------------------------------------------


def _float_binop(op: str, a: float, b: float) -> float:
    try:
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        elif op == "/":
            r = a / b
        else:
            r = _jet._float_pow(a, b)
    except ZeroDivisionError as exc:
        raise DomainError("division by zero") from exc
    except OverflowError as exc:
        raise DomainError("overflow") from exc
    if not math.isfinite(r):
        raise DomainError("non-finite value")
    return r


_FLOAT_FUNCS = {
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "sqrt": math.sqrt,
}


def _float_call(func: str, x: float) -> float:
    if func in ("log", "sqrt") and x <= 0:
        raise DomainError(f"{func} of a non-positive value")
    try:
        r = _FLOAT_FUNCS[func](x)
    except OverflowError as exc:
        raise DomainError("overflow") from exc
    if not math.isfinite(r):
        raise DomainError("non-finite value")
    return r


def _constant_exponent(node: Expr):
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Neg) and isinstance(node.operand, Number):
        return -node.operand.value
    return None


def _eval(node: Expr, env):
    try:
        if isinstance(node, Number):
            return node.value
        if isinstance(node, Var):
            return env[node.name]
        if isinstance(node, Neg):
            return -_eval(node.operand, env)
        if isinstance(node, Call):
            arg = _eval(node.arg, env)
            if isinstance(arg, Jet):
                return _jet.FUNCTIONS[node.func](arg)
            return _float_call(node.func, arg)
        left = _eval(node.left, env)
        if node.op == "^":
            p = _constant_exponent(node.right)
            if p is not None and isinstance(left, Jet):
                return left.power(p)
        right = _eval(node.right, env)
        if not isinstance(left, Jet) and not isinstance(right, Jet):
            return _float_binop(node.op, left, right)
        return _jet.jet_apply(node.op, left, right)
    except DomainError as exc:
        if exc.expression is None:
            raise DomainError(str(exc), to_text(node)) from None
        raise


def evaluate(node: Expr, env: Mapping[str, Jet]) -> Jet:
    """Evaluate over jets; ``env`` maps every free variable to a jet."""
    ref = next((v for v in env.values() if isinstance(v, Jet)), None)
    if ref is None:
        raise ValueError("environment must bind at least one jet")
    missing = free_variables(node) - set(env)
    if missing:
        raise KeyError(f"unbound variables: {sorted(missing)}")
    out = _eval(node, env)
    if not isinstance(out, Jet):
        out = Jet.constant(out, ref.nvars, ref.order)
    return out


def evaluate_float(node: Expr, values: Mapping[str, float]) -> float:
    """Plain floating-point evaluation (no derivatives)."""
    env = {k: float(v) for k, v in values.items()}
    missing = free_variables(node) - set(env)
    if missing:
        raise KeyError(f"unbound variables: {sorted(missing)}")
    return float(_eval(node, env))
