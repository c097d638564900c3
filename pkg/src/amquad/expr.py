"""Tiny single-variable expression language used to store corpus functions as data.

Grammar (lowest to highest precedence)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" unary)?          # right-associative
    atom   := NUMBER | "x" | "e" | "pi" | NAME "(" args ")" | "(" expr ")"

So ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``.  The full table lives in
GRAMMAR.md.  Evaluation goes through numpy, so ``x`` may be a float or an array.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .model import EvaluationError

__all__ = [
    "ExprError",
    "ExprSyntaxError",
    "UnknownIdentifierError",
    "ExprEvalError",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse",
    "unparse",
    "eval_expr",
    "compile_expr",
    "DerivativeCheck",
    "validate_derivative",
]

# bounds both parser recursion and tree height, so walks over the AST cannot overflow the stack
MAX_DEPTH = 100
FUNCTIONS = {"exp": 1, "ln": 1, "abs": 1, "sqrt": 1, "pow": 2}
CONSTANTS = {"e": math.e, "pi": math.pi}


class ExprError(Exception):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class UnknownIdentifierError(ExprSyntaxError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r}", offset)
        self.name = name


class ExprEvalError(ExprError, EvaluationError):
    """Domain error or non-finite value; ``offset`` locates the node in the source."""

    def __init__(self, message: str, offset: int, x: float):
        EvaluationError.__init__(self, f"{message} (node at byte {offset}, x={x!r})", x)
        self.offset = offset


@dataclass(frozen=True)
class Num:
    value: float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    pos: int = field(default=0, compare=False)


Node = Union[Num, Var, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    while i < len(src):
        mo = _TOKEN.match(src, i)
        if mo is None:
            raise ExprSyntaxError(f"unexpected character {src[i]!r}", _byte_offset(src, i))
        kind = mo.lastgroup
        if kind != "ws":
            tokens.append((kind, mo.group(), _byte_offset(src, i)))
        i = mo.end()
    tokens.append(("end", "", _byte_offset(src, len(src))))
    return tokens


def _byte_offset(src: str, i: int) -> int:
    return len(src[:i].encode("utf-8", errors="surrogatepass"))


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0
        self.depth = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> tuple[str, str, int]:
        tok = self.take()
        if tok[1] != text or tok[0] == "end":
            found = tok[1] or "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found!r}", tok[2])
        return tok

    def descend(self, pos: int) -> None:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ExprSyntaxError("expression nested too deeply", pos)

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = BinOp(op, node, self.term(), pos)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = BinOp(op, node, self.unary(), pos)
        return node

    def unary(self) -> Node:
        kind, text, pos = self.peek()
        if kind == "op" and text in ("-", "+"):
            self.take()
            self.descend(pos)
            operand = self.unary()
            self.depth -= 1
            return Neg(operand, pos) if text == "-" else operand
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.take()
            self.descend(pos)
            exponent = self.unary()
            self.depth -= 1
            return BinOp("^", base, exponent, pos)
        return base

    def atom(self) -> Node:
        kind, text, pos = self.take()
        if kind == "num":
            value = float(text)
            if not math.isfinite(value):
                raise ExprSyntaxError(f"numeric literal {text!r} overflows", pos)
            return Num(value, pos)
        if kind == "name":
            if text == "x":
                return Var(pos)
            if text in CONSTANTS:
                return Num(CONSTANTS[text], pos)
            if text in FUNCTIONS:
                return self.call(text, pos)
            raise UnknownIdentifierError(text, pos)
        if kind == "op" and text == "(":
            self.descend(pos)
            node = self.expr()
            self.depth -= 1
            self.expect(")")
            return node
        found = text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", pos)

    def call(self, name: str, pos: int) -> Node:
        self.expect("(")
        self.descend(pos)
        args = [self.expr()]
        while self.peek()[1] == ",":
            self.take()
            args.append(self.expr())
        self.depth -= 1
        self.expect(")")
        if len(args) != FUNCTIONS[name]:
            raise ExprSyntaxError(
                f"{name} takes {FUNCTIONS[name]} argument(s), got {len(args)}", pos
            )
        if name == "pow":
            return BinOp("^", args[0], args[1], pos)
        return Call(name, tuple(args), pos)


def parse(src: str) -> Node:
    """Parse ``src`` into an AST.

    Raises ExprSyntaxError (with a byte offset) or UnknownIdentifierError.
    """
    p = _Parser(src)
    node = p.expr()
    kind, text, pos = p.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected {text!r}", pos)
    _check_height(node)
    return node


def _children(node: Node) -> tuple:
    if isinstance(node, Neg):
        return (node.operand,)
    if isinstance(node, BinOp):
        return (node.left, node.right)
    if isinstance(node, Call):
        return node.args
    return ()


def _check_height(root: Node) -> None:
    stack = [(root, 1)]
    while stack:
        node, depth = stack.pop()
        if depth > MAX_DEPTH:
            raise ExprSyntaxError("expression nested too deeply", node.pos)
        stack.extend((child, depth + 1) for child in _children(node))


def unparse(node: Node) -> str:
    """Fully parenthesised source text; ``parse(unparse(n)) == n``."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return f"(-{unparse(node.operand)})"
    if isinstance(node, BinOp):
        return f"({unparse(node.left)} {node.op} {unparse(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(unparse(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def _first_bad(x, mask) -> float:
    xs = np.broadcast_to(np.asarray(x, dtype=float), np.shape(mask))
    return float(xs[mask][0]) if np.ndim(mask) else float(xs)


def _eval(node: Node, x: np.ndarray) -> np.ndarray:
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    if isinstance(node, BinOp):
        left = _eval(node.left, x)
        right = _eval(node.right, x)
        if node.op == "+":
            out = left + right
        elif node.op == "-":
            out = left - right
        elif node.op == "*":
            out = left * right
        elif node.op == "/":
            zero = np.asarray(right == 0)
            if zero.any():
                raise ExprEvalError("division by zero", node.pos, _first_bad(x, zero))
            out = left / right
        else:
            out = np.power(left, right)
    else:
        arg = _eval(node.args[0], x)
        if node.name == "ln":
            bad = np.asarray(arg <= 0)
            if bad.any():
                raise ExprEvalError("ln of non-positive value", node.pos, _first_bad(x, bad))
            out = np.log(arg)
        elif node.name == "sqrt":
            bad = np.asarray(arg < 0)
            if bad.any():
                raise ExprEvalError("sqrt of negative value", node.pos, _first_bad(x, bad))
            out = np.sqrt(arg)
        elif node.name == "exp":
            out = np.exp(arg)
        else:
            out = np.abs(arg)
    bad = ~np.isfinite(out)
    if np.any(bad):
        raise ExprEvalError("non-finite result", node.pos, _first_bad(x, np.asarray(bad)))
    return out


def eval_expr(node: Node, x):
    """Evaluate ``node`` at ``x`` (float or array). Floats in, float out."""
    scalar = np.ndim(x) == 0
    xs = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(node, xs)
    if scalar:
        return float(out)
    return np.broadcast_to(out, xs.shape).astype(float, copy=True)


def compile_expr(src_or_node):
    """Return a callable ``g(x)`` for a source string or an AST."""
    node = parse(src_or_node) if isinstance(src_or_node, str) else src_or_node

    def g(x):
        return eval_expr(node, x)

    g.node = node
    return g


@dataclass(frozen=True)
class DerivativeCheck:
    passed: bool
    worst_deviation: float
    worst_x: float
    error: str | None = None

    def __bool__(self) -> bool:
        return self.passed


def validate_derivative(
    f: Node, fp: Node, domain_b: float, samples: int = 64, rtol: float = 1e-6
) -> DerivativeCheck:
    """Compare ``fp`` with central differences of ``f`` at interior points of (0, domain_b).

    Step is ``1e-5 * max(1, |x|)``; deviation is ``|fd - fp| / max(1, |fp|)``.
    Evaluation failures fail the check and name the offending abscissa.
    """
    xs = domain_b * (np.arange(samples) + 0.5) / samples
    worst, worst_x = 0.0, float(xs[0])
    for x in xs:
        x = float(x)
        h = 1e-5 * max(1.0, abs(x))
        try:
            fd = (eval_expr(f, x + h) - eval_expr(f, x - h)) / (2 * h)
            exact = eval_expr(fp, x)
        except ExprEvalError as exc:
            return DerivativeCheck(False, math.inf, x, str(exc))
        dev = abs(fd - exact) / max(1.0, abs(exact))
        if dev > worst:
            worst, worst_x = dev, x
    return DerivativeCheck(worst <= rtol, worst, worst_x)
