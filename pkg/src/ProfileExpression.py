# ProfileExpression.py
"""
Small expression language for initial-data profiles.

Grammar (EBNF), lowest precedence first:

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = "-" , unary | power ;
    power   = primary , [ "^" , unary ] ;          (* right-associative *)
    primary = number | "x" | name , "(" , expr , ")" | "(" , expr , ")" ;
    name    = "exp" | "ln" | "sqrt" | "sin" | "cos" | "tanh" | "abs" ;

`-x^2` parses as `-(x^2)` and `2^3^2` as `2^(3^2)`. Every function takes
exactly one argument.
"""

import math
import re
from dataclasses import dataclass
from typing import List, Tuple, Union
import logging

import numpy as np

from .Dual import Dual
from .GasBasics import (
    ArityError,
    EvaluationError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
)

logger = logging.getLogger(__name__)

FUNCTIONS = ("exp", "ln", "sqrt", "sin", "cos", "tanh", "abs")
OPERATORS = ("+", "-", "*", "/", "^")


class Expr:
    """Base of the immutable expression tree."""

    def evaluate(self, var: Dual, xs: np.ndarray) -> Dual:
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class Num(Expr):
    value: float

    def evaluate(self, var: Dual, xs: np.ndarray) -> Dual:
        return Dual.constant(self.value, like=var)

    def to_text(self) -> str:
        if self.value < 0:
            return f"(-{repr(-self.value)})"
        return repr(self.value)


@dataclass(frozen=True)
class Var(Expr):
    def evaluate(self, var: Dual, xs: np.ndarray) -> Dual:
        return var

    def to_text(self) -> str:
        return "x"


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def evaluate(self, var: Dual, xs: np.ndarray) -> Dual:
        return -self.operand.evaluate(var, xs)

    def to_text(self) -> str:
        return f"(-{self.operand.to_text()})"


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def evaluate(self, var: Dual, xs: np.ndarray) -> Dual:
        a = self.left.evaluate(var, xs)
        b = self.right.evaluate(var, xs)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            _fault(b.value == 0.0, xs, self, "division by zero")
            return a / b
        # "^"
        integral = not np.any(b.derivative) and np.all(b.value == np.round(b.value))
        if not integral:
            _fault(a.value <= 0.0, xs, self, "non-integer power of a non-positive base")
        else:
            _fault((a.value == 0.0) & (b.value < 0.0), xs, self, "negative power of zero")
        return a ** b

    def to_text(self) -> str:
        return f"({self.left.to_text()} {self.op} {self.right.to_text()})"


@dataclass(frozen=True)
class Call(Expr):
    name: str
    arg: Expr

    def evaluate(self, var: Dual, xs: np.ndarray) -> Dual:
        a = self.arg.evaluate(var, xs)
        if self.name == "ln":
            _fault(a.value <= 0.0, xs, self, "ln of a non-positive value")
            return a.log()
        if self.name == "sqrt":
            _fault(a.value < 0.0, xs, self, "sqrt of a negative value")
            return a.sqrt()
        if self.name == "exp":
            return a.exp()
        if self.name == "sin":
            return a.sin()
        if self.name == "cos":
            return a.cos()
        if self.name == "tanh":
            return a.tanh()
        return abs(a)

    def to_text(self) -> str:
        return f"{self.name}({self.arg.to_text()})"


def _fault(mask, xs: np.ndarray, node: Expr, message: str):
    mask = np.broadcast_to(np.asarray(mask), xs.shape)
    if np.any(mask):
        x = float(xs[np.argmax(mask)])
        raise EvaluationError(f"{message} in {node.to_text()} at x={x!r}", x=x, subexpression=node.to_text())


# ----------------------------------------------------------------------
#                               PARSER
# ----------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


class Token:
    def __init__(self, kind: str, text: str, offset: int):
        self.kind = kind  # number | name | op | end
        self.text = text
        self.offset = offset  # byte offset into the UTF-8 source

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r}, {self.offset})"


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExpressionSyntaxError(
                f"unexpected character {text[start]!r} at byte {_byte_offset(text, start)}",
                offset=_byte_offset(text, start),
                expected=("number", "x", "function", "(", "-"),
            )
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), _byte_offset(text, start)))
        pos = m.end()
    tokens.append(Token("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class Parser:
    """Recursive-descent parser over the token list of one expression."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def fail(self, expected: Tuple[str, ...]):
        token = self.current
        found = "end of input" if token.kind == "end" else repr(token.text)
        raise ExpressionSyntaxError(
            f"found {found} at byte {token.offset}, expected one of {', '.join(expected)}",
            offset=token.offset,
            expected=expected,
        )

    def expect(self, text: str):
        if self.current.kind == "op" and self.current.text == text:
            return self.advance()
        self.fail((text,))

    def parse(self) -> Expr:
        expr = self.expr()
        if self.current.kind != "end":
            self.fail(OPERATORS + ("end of input",))
        return expr

    def expr(self) -> Expr:
        node = self.term()
        while self.current.kind == "op" and self.current.text in ("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.current.kind == "op" and self.current.text in ("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.current.kind == "op" and self.current.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.current.kind == "op" and self.current.text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def primary(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.advance()
            value = float(token.text)
            if not math.isfinite(value):
                raise ExpressionSyntaxError(
                    f"number {token.text!r} out of range at byte {token.offset}",
                    offset=token.offset,
                    expected=("finite number",),
                )
            return Num(value)
        if token.kind == "name":
            self.advance()
            if token.text == "x":
                return Var()
            if token.text not in FUNCTIONS:
                raise UnknownIdentifierError(
                    f"{token.text!r} at byte {token.offset}",
                    offset=token.offset,
                    expected=("x",) + FUNCTIONS,
                )
            return self.call(token)
        if token.kind == "op" and token.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(("number", "x", "function", "(", "-"))

    def call(self, name: Token) -> Expr:
        self.expect("(")
        if self.current.kind == "op" and self.current.text == ")":
            raise ArityError(
                f"{name.text} takes 1 argument, got 0 (byte {name.offset})",
                offset=name.offset,
                expected=("expression",),
            )
        arg = self.expr()
        count = 1
        while self.current.kind == "op" and self.current.text == ",":
            self.advance()
            self.expr()
            count += 1
        if count != 1:
            raise ArityError(
                f"{name.text} takes 1 argument, got {count} (byte {name.offset})",
                offset=name.offset,
                expected=(")",),
            )
        self.expect(")")
        return Call(name.text, arg)


def parse(text: str) -> Expr:
    """
    Parse profile text into an expression tree.

    Raises:
        ExpressionSyntaxError: with byte offset and expected-token set.
        UnknownIdentifierError: a name other than x or a known function.
        ArityError: a function applied to other than one argument.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return Parser(text).parse()


def serialize(e: Expr) -> str:
    return e.to_text()


def eval_d(e: Expr, x: Union[float, np.ndarray]) -> Tuple[Union[float, np.ndarray], Union[float, np.ndarray]]:
    """
    Value and exact first derivative of e at x (scalar or array).

    Raises:
        EvaluationError: domain fault or non-finite result, carrying the first
            offending x and the offending subexpression.
    """
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    with np.errstate(all="ignore"):
        result = e.evaluate(Dual.variable(xs), xs)
    value = np.broadcast_to(result.value, xs.shape)
    derivative = np.broadcast_to(result.derivative, xs.shape)
    _fault(~np.isfinite(value), xs, e, "non-finite value")
    _fault(~np.isfinite(derivative), xs, e, "non-finite derivative")
    if scalar:
        return float(value[0]), float(derivative[0])
    return np.array(value), np.array(derivative)


def constant(value: float) -> Expr:
    """Literal node shaped like the parser builds it: negatives as Neg(Num(|v|))."""
    value = float(value)
    if math.copysign(1.0, value) < 0.0:
        return Neg(Num(-value))
    return Num(value)


def power_of(base: Expr, exponent: float) -> Expr:
    return BinOp("^", base, constant(exponent))


def isentropic_pressure_expr(rho0: Expr, gamma: float) -> Expr:
    """rho0^gamma / gamma as an expression tree."""
    return BinOp("/", power_of(rho0, gamma), constant(gamma))


def chaplygin_pressure_expr(rho0: Expr) -> Expr:
    """rho0^(-1) / (-1) = -1/rho0, the isentropic Chaplygin pressure."""
    return Neg(BinOp("/", Num(1.0), rho0))
