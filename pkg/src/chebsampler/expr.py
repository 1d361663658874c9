"""Density expressions given as strings.

Grammar, loosest binding first::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := number | 'x' | 'y' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'

So ``^`` is right-associative and binds tighter than unary minus
(``-2^2 == -4``), and there is no implicit multiplication (``2x`` is an
error). Offsets in error messages are 0-based byte offsets into the UTF-8
encoded source.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .density import DensityFn
from .errors import ExprSyntaxError, UnknownIdentifierError


def _sech(t):
    a = np.exp(-np.abs(t))
    return 2.0 * a / (1.0 + a * a)


FUNCTIONS = {
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
    "cosh": np.cosh,
    "sinh": np.sinh,
    "tanh": np.tanh,
    "sech": _sech,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("x", "y")

# binding strength used by the printer
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _divide(a, b):
    b = np.asarray(b, dtype=float)
    return np.where(b == 0.0, np.nan, a / np.where(b == 0.0, 1.0, b))


_BINARY = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": _divide,
    "^": np.power,
}


class Node:
    """Base of the immutable expression tree."""

    prec = _PREC["atom"]

    def variables(self) -> frozenset:
        return frozenset()

    @property
    def arity(self) -> int:
        return 2 if "y" in self.variables() else 1

    def evaluate(self, x, y=None):
        """Tree-walking evaluation with numpy broadcasting."""
        with np.errstate(all="ignore"):
            return self._eval(np.asarray(x, dtype=float),
                              None if y is None else np.asarray(y, dtype=float))

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Num(Node):
    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0.0):
            raise ValueError(f"literal must be finite and non-negative, got {self.value}")

    def _eval(self, x, y):
        return np.float64(self.value)


@dataclass(frozen=True)
class Const(Node):
    name: str

    def _eval(self, x, y):
        return np.float64(CONSTANTS[self.name])


@dataclass(frozen=True)
class Var(Node):
    name: str

    def variables(self):
        return frozenset([self.name])

    def _eval(self, x, y):
        if self.name == "x":
            return x
        if y is None:
            raise ValueError("expression uses y but was evaluated with one argument")
        return y


@dataclass(frozen=True)
class Neg(Node):
    operand: Node
    prec = _PREC["neg"]

    def variables(self):
        return self.operand.variables()

    def _eval(self, x, y):
        return np.negative(self.operand._eval(x, y))


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    @property
    def prec(self):
        return _PREC[self.op]

    def variables(self):
        return self.left.variables() | self.right.variables()

    def _eval(self, x, y):
        return _BINARY[self.op](self.left._eval(x, y), self.right._eval(x, y))


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node

    def variables(self):
        return self.arg.variables()

    def _eval(self, x, y):
        return FUNCTIONS[self.func](self.arg._eval(x, y))


Expr = Node

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src: str):
    offset = lambda i: len(src[:i].encode("utf-8"))  # noqa: E731
    toks, i = [], 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[i]!r}", offset(i))
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), offset(i)))
        i = m.end()
    toks.append(_Tok("end", "", len(src.encode("utf-8"))))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _fail(self, what="unexpected"):
        t = self.tok
        shown = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"{what} {shown}", t.pos)

    def _accept(self, text) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def _expect(self, text):
        if not self._accept(text):
            self._fail(f"expected {text!r}, found")

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self._fail()
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self._accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self._accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(float(t.text))
        if t.kind == "ident":
            self.i += 1
            if t.text in FUNCTIONS:
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Call(t.text, arg)
            if t.text in VARIABLES:
                return Var(t.text)
            if t.text in CONSTANTS:
                return Const(t.text)
            raise UnknownIdentifierError(f"unknown identifier {t.text!r}", t.pos)
        if self._accept("("):
            node = self.expr()
            self._expect(")")
            return node
        self._fail()


def parse(src: str) -> Node:
    """Parse ``src`` into an expression tree.

    Raises
    ------
    ExprSyntaxError
        Malformed input; ``position`` is the offset of the offending token.
    UnknownIdentifierError
        A name that is neither a variable, a constant nor a function.
    """
    return _Parser(src).parse()


def _fmt_num(v: float) -> str:
    if v.is_integer() and v < 1e15:
        return str(int(v))
    return repr(v)


def to_string(node: Node) -> str:
    """Render with the fewest parentheses that reparse to the same tree."""
    def wrap(child, min_prec):
        s = to_string(child)
        return f"({s})" if child.prec < min_prec else s

    if isinstance(node, Num):
        return _fmt_num(node.value)
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    if isinstance(node, Neg):
        return "-" + wrap(node.operand, _PREC["neg"])
    if node.op == "^":
        return wrap(node.left, _PREC["atom"]) + "^" + wrap(node.right, _PREC["neg"])
    p = _PREC[node.op]
    return f"{wrap(node.left, p)}{node.op}{wrap(node.right, p + 1)}"


def compile_expr(node: Node | str, label: str | None = None) -> DensityFn:
    """Wrap an expression as a counted, thread-safe :class:`DensityFn`.

    The arity is 2 when the expression mentions ``y`` and 1 otherwise.
    Values agree exactly with :meth:`Node.evaluate`.
    """
    if isinstance(node, str):
        label = node if label is None else label
        node = parse(node)
    label = to_string(node) if label is None else label

    if node.arity == 1:
        def func(x):
            x = np.asarray(x, dtype=float)
            return np.broadcast_to(node.evaluate(x), x.shape).astype(float)
    else:
        def func(x, y):
            x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
            return np.broadcast_to(node.evaluate(x, y), x.shape).astype(float)

    return DensityFn(func, node.arity, thread_safe=True, label=label)
