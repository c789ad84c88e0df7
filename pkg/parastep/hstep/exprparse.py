"""
Arithmetic expressions in one real variable t.

Grammar, loosest binding first::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?
    atom    := NUMBER | "t" | "pi" | FUNC "(" expr ")" | "(" expr ")"
    FUNC    := "abs" | "log" | "exp"

Whitespace is insignificant. Expression trees are immutable and hashable, so
they can key caches and be compared structurally.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, NoReturn

import numpy as np

from .exceptions import ExprEvalError, ExprSyntaxError

if TYPE_CHECKING:
    from collections.abc import Callable

_LOGGER = logging.getLogger(__name__)

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)
_SPACE_RE = re.compile(r"\s*")

VARIABLE_NAME = "t"
NAMED_CONSTANTS: dict[str, float] = {"pi": math.pi}


class BinaryOp(Enum):
    """Binary operators."""

    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"
    POW = "^"


class UnaryOp(Enum):
    """Unary operators and functions."""

    NEG = "-"
    ABS = "abs"
    LOG = "log"
    EXP = "exp"


_FUNCTIONS = {op.value: op for op in (UnaryOp.ABS, UnaryOp.LOG, UnaryOp.EXP)}


@dataclass(frozen=True, slots=True)
class Constant:
    """A literal number."""

    value: float

    def __str__(self) -> str:
        """Return the shortest text that reads back to the same float."""
        return repr(self.value)


@dataclass(frozen=True, slots=True)
class Variable:
    """The variable t."""

    def __str__(self) -> str:
        """Return the variable name."""
        return VARIABLE_NAME


@dataclass(frozen=True, slots=True)
class NamedConstant:
    """A named constant such as pi."""

    name: str

    def __str__(self) -> str:
        """Return the constant name."""
        return self.name


@dataclass(frozen=True, slots=True)
class Unary:
    """Negation or a one-argument function."""

    op: UnaryOp
    operand: Expr

    def __str__(self) -> str:
        """Return fully parenthesized text."""
        if self.op is UnaryOp.NEG:
            return f"(-{self.operand})"
        return f"{self.op.value}({self.operand})"


@dataclass(frozen=True, slots=True)
class Binary:
    """An arithmetic operation on two subexpressions."""

    op: BinaryOp
    left: Expr
    right: Expr

    def __str__(self) -> str:
        """Return fully parenthesized text."""
        return f"({self.left} {self.op.value} {self.right})"


Expr = Constant | Variable | NamedConstant | Unary | Binary


class _Parser:
    """Recursive descent over a token list with a cursor."""

    def __init__(self, text: str) -> None:
        self._text = text
        self._tokens = _tokenize(text)
        self._pos = 0

    def parse(self) -> Expr:
        expr = self._expr()
        if self._peek() is not None:
            self._fail("unexpected token")
        return expr

    def _peek(self) -> str | None:
        if self._pos >= len(self._tokens):
            return None
        return self._tokens[self._pos][1]

    def _offset(self) -> int:
        if self._pos >= len(self._tokens):
            start = len(self._text.rstrip())
        else:
            start = self._tokens[self._pos][0]
        return len(self._text[:start].encode("utf-8"))

    def _fail(self, reason: str) -> NoReturn:
        raise ExprSyntaxError(reason, self._offset())

    def _next(self) -> str:
        token = self._peek()
        if token is None:
            self._fail("unexpected end of input")
        self._pos += 1
        return token

    def _expect(self, token: str) -> None:
        if self._peek() != token:
            self._fail(f"expected '{token}'")
        self._pos += 1

    def _expr(self) -> Expr:
        node = self._term()
        while (token := self._peek()) in ("+", "-"):
            self._pos += 1
            node = Binary(BinaryOp(token), node, self._term())
        return node

    def _term(self) -> Expr:
        node = self._unary()
        while (token := self._peek()) in ("*", "/"):
            self._pos += 1
            node = Binary(BinaryOp(token), node, self._unary())
        return node

    def _unary(self) -> Expr:
        if self._peek() == "-":
            self._pos += 1
            return Unary(UnaryOp.NEG, self._unary())
        return self._power()

    def _power(self) -> Expr:
        base = self._atom()
        if self._peek() == "^":
            self._pos += 1
            # right operand binds through unary minus, so 2^-1 and 2^3^2 both parse
            return Binary(BinaryOp.POW, base, self._unary())
        return base

    def _atom(self) -> Expr:
        offset = self._offset()
        token = self._next()
        if token == "(":
            node = self._expr()
            self._expect(")")
            return node
        if token[0].isdigit() or token[0] == ".":
            value = float(token)
            if not math.isfinite(value):
                raise ExprSyntaxError("number out of range", offset)
            return Constant(value)
        if token == VARIABLE_NAME:
            return Variable()
        if token in NAMED_CONSTANTS:
            return NamedConstant(token)
        if token in _FUNCTIONS:
            self._expect("(")
            node = self._expr()
            self._expect(")")
            return Unary(_FUNCTIONS[token], node)
        if token[0].isalpha() or token[0] == "_":
            raise ExprSyntaxError(f"unknown name '{token}'", offset)
        raise ExprSyntaxError(f"unexpected '{token}'", offset)


def _tokenize(text: str) -> list[tuple[int, str]]:
    tokens: list[tuple[int, str]] = []
    pos = 0
    while True:
        pos = _SPACE_RE.match(text, pos).end()
        if pos >= len(text):
            return tokens
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            raise ExprSyntaxError(
                f"unexpected character {text[pos]!r}", len(text[:pos].encode("utf-8"))
            )
        start = match.start(match.lastgroup)
        tokens.append((start, match.group(match.lastgroup)))
        pos = match.end()


def parse(text: str) -> Expr:
    """
    Parse an expression in t.

    Parameters
    ----------
    text : str
        Expression source, for example ``"1/(pi*(1+t^2)^2)"``.

    Returns
    -------
    Expr
        The expression tree; ``parse(str(tree)) == tree``.

    Raises
    ------
    ExprSyntaxError
        With the byte offset of the first offending position.

    """
    expr = _Parser(text).parse()
    _LOGGER.debug("Parsed %r as %s", text, expr)
    return expr


def has_variable(expr: Expr) -> bool:
    """Return True when t occurs in the expression."""
    match expr:
        case Variable():
            return True
        case Unary(operand=operand):
            return has_variable(operand)
        case Binary(left=left, right=right):
            return has_variable(left) or has_variable(right)
        case _:
            return False


def _scalar_binary(op: BinaryOp, left: float, right: float) -> float:
    match op:
        case BinaryOp.ADD:
            return left + right
        case BinaryOp.SUB:
            return left - right
        case BinaryOp.MUL:
            return left * right
        case BinaryOp.DIV:
            if right == 0:
                msg = "division by zero"
                raise ExprEvalError(msg)
            return left / right
        case BinaryOp.POW:
            try:
                return math.pow(left, right)
            except (ValueError, OverflowError) as ex:
                msg = f"invalid power {left!r}^{right!r}"
                raise ExprEvalError(msg) from ex


def _scalar_unary(op: UnaryOp, value: float) -> float:
    match op:
        case UnaryOp.NEG:
            return -value
        case UnaryOp.ABS:
            return abs(value)
        case UnaryOp.LOG:
            if value <= 0:
                msg = f"log of non-positive value {value!r}"
                raise ExprEvalError(msg)
            return math.log(value)
        case UnaryOp.EXP:
            try:
                return math.exp(value)
            except OverflowError as ex:
                msg = f"exp overflow at {value!r}"
                raise ExprEvalError(msg) from ex


def _evaluate(expr: Expr, t: float) -> float:
    match expr:
        case Constant(value=value):
            return value
        case Variable():
            return t
        case NamedConstant(name=name):
            return NAMED_CONSTANTS[name]
        case Unary(op=op, operand=operand):
            return _scalar_unary(op, _evaluate(operand, t))
        case Binary(op=op, left=left, right=right):
            return _scalar_binary(op, _evaluate(left, t), _evaluate(right, t))
    msg = f"unknown node {expr!r}"
    raise TypeError(msg)


def eval_expr(expr: Expr, t: float) -> float:
    """Evaluate at a real t; raise ExprEvalError unless the result is finite."""
    value = _evaluate(expr, t)
    if not math.isfinite(value):
        msg = f"non-finite result {value!r} at t={t!r}"
        raise ExprEvalError(msg)
    return value


_ARRAY_BINARY: dict[BinaryOp, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    BinaryOp.ADD: np.add,
    BinaryOp.SUB: np.subtract,
    BinaryOp.MUL: np.multiply,
    BinaryOp.DIV: np.divide,
    BinaryOp.POW: np.power,
}


def _evaluate_array(expr: Expr, ts: np.ndarray) -> np.ndarray | float:
    match expr:
        case Constant(value=value):
            return value
        case Variable():
            return ts
        case NamedConstant(name=name):
            return NAMED_CONSTANTS[name]
        case Unary(op=op, operand=operand):
            value = _evaluate_array(operand, ts)
            match op:
                case UnaryOp.NEG:
                    return np.negative(value)
                case UnaryOp.ABS:
                    return np.abs(value)
                case UnaryOp.LOG:
                    if np.any(np.asarray(value) <= 0):
                        msg = "log of non-positive value"
                        raise ExprEvalError(msg)
                    return np.log(value)
                case UnaryOp.EXP:
                    return np.exp(value)
        case Binary(op=op, left=left, right=right):
            lhs = _evaluate_array(left, ts)
            rhs = _evaluate_array(right, ts)
            if op is BinaryOp.DIV and np.any(np.asarray(rhs) == 0):
                msg = "division by zero"
                raise ExprEvalError(msg)
            return _ARRAY_BINARY[op](lhs, rhs)
    msg = f"unknown node {expr!r}"
    raise TypeError(msg)


def eval_array(expr: Expr, ts: np.ndarray) -> np.ndarray:
    """Evaluate at every element of ts; any non-finite entry is an error."""
    ts = np.asarray(ts, dtype=float)
    with np.errstate(all="ignore"):
        values = np.broadcast_to(_evaluate_array(expr, ts), ts.shape).astype(float)
    if not np.all(np.isfinite(values)):
        bad = ts[~np.isfinite(values)]
        msg = f"non-finite result at t={bad.flat[0]!r}"
        raise ExprEvalError(msg)
    return values


def constant_value(text: str) -> float:
    """Parse and evaluate an expression that must not mention t."""
    expr = parse(text)
    if has_variable(expr):
        msg = f"constant expected, '{text}' depends on t"
        raise ExprEvalError(msg)
    return eval_expr(expr, 0.0)
