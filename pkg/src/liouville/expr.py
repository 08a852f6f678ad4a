"""Small arithmetic-expression language with exact first and second
derivatives.

Source text is parsed once into an immutable AST; evaluation runs on
second-order dual numbers (value, first, second derivative propagated
together), so callers get f, f', f'' to machine rounding in one pass.
Evaluation works over real or complex scalars and elementwise over numpy
arrays of either, which keeps grid sampling vectorized.

Grammar, tightest binding first (``^`` is right-associative and its
exponent must fold to an integer constant):

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Known functions: exp, ln, sin, cos, sinh, cosh, sqrt.  General real
powers are spelled exp(p*ln(x)).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Union

import numpy as np

from .errors import (
    ArityError,
    DomainError,
    ExprError,
    ExprSyntaxError,
    UnknownIdentifierError,
)

__all__ = ["Expr", "EvalResult", "parse", "eval_dual", "eval_complex", "FUNCTIONS"]

FUNCTIONS = ("exp", "ln", "sin", "cos", "sinh", "cosh", "sqrt")


# --- AST ----------------------------------------------------------------

@dataclass(frozen=True)
class _Node:
    span: tuple[int, int]  # [start, end) byte offsets into the source


@dataclass(frozen=True)
class _Num(_Node):
    value: float


@dataclass(frozen=True)
class _Var(_Node):
    name: str


@dataclass(frozen=True)
class _Neg(_Node):
    operand: _Node


@dataclass(frozen=True)
class _BinOp(_Node):
    op: str  # one of + - * /
    left: _Node
    right: _Node


@dataclass(frozen=True)
class _Pow(_Node):
    base: _Node
    exponent: int


@dataclass(frozen=True)
class _Call(_Node):
    func: str
    arg: _Node


# --- tokenizer ----------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


class _Token(NamedTuple):
    kind: str  # number | name | op | end
    text: str
    pos: int


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(src)))
    return tokens


# --- parser -------------------------------------------------------------

class _Parser:
    def __init__(self, src: str, variables: tuple[str, ...]):
        self.src = src
        self.vars = variables
        self.tokens = _tokenize(src)
        self.k = 0

    def peek(self) -> _Token:
        return self.tokens[self.k]

    def next(self) -> _Token:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise ExprSyntaxError(f"expected {text!r}", tok.pos)
        return self.next()

    def parse(self) -> _Node:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {tok.text!r}", tok.pos)
        return node

    def expr(self) -> _Node:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next()
            rhs = self.term()
            node = _BinOp((node.span[0], rhs.span[1]), op.text, node, rhs)
        return node

    def term(self) -> _Node:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.next()
            rhs = self.unary()
            node = _BinOp((node.span[0], rhs.span[1]), op.text, node, rhs)
        return node

    def unary(self) -> _Node:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.next()
            operand = self.unary()
            return _Neg((tok.pos, operand.span[1]), operand)
        return self.power()

    def power(self) -> _Node:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.next()
            exponent = self.unary()  # right-associative
            n = _const_int(exponent)
            if n is None:
                raise ExprSyntaxError(
                    "exponent of ^ must fold to an integer constant",
                    exponent.span[0],
                )
            return _Pow((base.span[0], exponent.span[1]), base, n)
        return base

    def atom(self) -> _Node:
        tok = self.next()
        if tok.kind == "number":
            return _Num((tok.pos, tok.pos + len(tok.text)), float(tok.text))
        if tok.kind == "name":
            if tok.text in FUNCTIONS:
                opener = self.peek()
                if opener.kind != "op" or opener.text != "(":
                    raise ArityError(
                        f"function '{tok.text}' needs one parenthesized argument",
                        tok.pos,
                    )
                self.next()
                arg = self.expr()
                comma = self.peek()
                if comma.kind == "op" and comma.text == ",":
                    raise ArityError(
                        f"function '{tok.text}' takes exactly one argument",
                        comma.pos,
                    )
                closer = self.expect_op(")")
                return _Call((tok.pos, closer.pos + 1), tok.text, arg)
            if tok.text in self.vars:
                return _Var((tok.pos, tok.pos + len(tok.text)), tok.text)
            raise UnknownIdentifierError(tok.text, tok.pos)
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(
            f"unexpected {tok.text!r}" if tok.kind != "end" else "unexpected end of input",
            tok.pos,
        )


def _const_int(node: _Node):
    """Fold a variable-free subtree to an int, or return None."""
    if isinstance(node, _Num):
        v = node.value
        return int(v) if float(v).is_integer() else None
    if isinstance(node, _Neg):
        inner = _const_int(node.operand)
        return None if inner is None else -inner
    if isinstance(node, _BinOp) and node.op in "+-*":
        a = _const_int(node.left)
        b = _const_int(node.right)
        if a is None or b is None:
            return None
        return a + b if node.op == "+" else a - b if node.op == "-" else a * b
    if isinstance(node, _Pow):
        a = _const_int(node.base)
        if a is None or node.exponent < 0:
            return None
        return a ** node.exponent
    return None


# --- printing -----------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 10, 20, 30, 40, 50


def _print(node: _Node, ctx: int) -> str:
    if isinstance(node, _Num):
        s = repr(node.value)
        return s if node.value >= 0 else f"({s})"
    if isinstance(node, _Var):
        return node.name
    if isinstance(node, _Call):
        return f"{node.func}({_print(node.arg, 0)})"
    if isinstance(node, _Neg):
        body = f"-{_print(node.operand, _PREC_NEG)}"
        return body if ctx <= _PREC_NEG else f"({body})"
    if isinstance(node, _Pow):
        base = _print(node.base, _PREC_ATOM)
        exp = str(node.exponent) if node.exponent >= 0 else f"({node.exponent})"
        body = f"{base}^{exp}"
        return body  # ^ binds tightest, never needs outer parens
    if isinstance(node, _BinOp):
        prec = _PREC_ADD if node.op in "+-" else _PREC_MUL
        left = _print(node.left, prec)
        right = _print(node.right, prec + 1)  # left-associative
        body = f"{left} {node.op} {right}"
        return body if ctx <= prec else f"({body})"
    raise TypeError(node)


# --- public expression object -------------------------------------------

@dataclass(frozen=True)
class Expr:
    """An immutable parsed expression over one or two named variables."""

    source: str
    vars: tuple[str, ...]
    ast: _Node

    def __str__(self) -> str:
        return _print(self.ast, 0)

    def snippet(self, node: _Node) -> str:
        return self.source[node.span[0]:node.span[1]]


def parse(source: str, variables) -> Expr:
    """Parse ``source`` over the ordered variable names ``variables``."""
    names = tuple(variables)
    if not 1 <= len(names) <= 2:
        raise ExprError(f"expected 1 or 2 variable names, got {len(names)}")
    if len(set(names)) != len(names):
        raise ExprError(f"duplicate variable names in {names}")
    for name in names:
        if name in FUNCTIONS or not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            raise ExprError(f"invalid variable name {name!r}")
    ast = _Parser(source, names).parse()
    return Expr(source, names, ast)


# --- evaluation ---------------------------------------------------------

class EvalResult(NamedTuple):
    value: Union[float, complex, np.ndarray]
    d1: Union[float, complex, np.ndarray]
    d2: Union[float, complex, np.ndarray]


class _Jet:
    """Order-2 jet (value, d, dd); payloads are scalars or numpy arrays."""

    __slots__ = ("v", "d", "dd")

    def __init__(self, v, d, dd):
        self.v = v
        self.d = d
        self.dd = dd


def _any(cond) -> bool:
    return bool(np.any(cond))


class _Evaluator:
    def __init__(self, expr: Expr, values: Mapping, wrt: str, is_complex: bool):
        self.expr = expr
        self.values = values
        self.wrt = wrt
        self.is_complex = is_complex

    def fail(self, node: _Node, message: str):
        raise DomainError(message, self.expr.snippet(node))

    def run(self, node: _Node) -> _Jet:
        if isinstance(node, _Num):
            v = complex(node.value) if self.is_complex else node.value
            return _Jet(v, 0.0, 0.0)
        if isinstance(node, _Var):
            v = self.values[node.name]
            seed = 1.0 if node.name == self.wrt else 0.0
            return _Jet(v, seed, 0.0)
        if isinstance(node, _Neg):
            u = self.run(node.operand)
            return _Jet(-u.v, -u.d, -u.dd)
        if isinstance(node, _BinOp):
            return self.binop(node)
        if isinstance(node, _Pow):
            return self.intpow(node)
        if isinstance(node, _Call):
            return self.call(node)
        raise TypeError(node)

    def binop(self, node: _BinOp) -> _Jet:
        u = self.run(node.left)
        w = self.run(node.right)
        if node.op == "+":
            return _Jet(u.v + w.v, u.d + w.d, u.dd + w.dd)
        if node.op == "-":
            return _Jet(u.v - w.v, u.d - w.d, u.dd - w.dd)
        if node.op == "*":
            return _Jet(
                u.v * w.v,
                u.d * w.v + u.v * w.d,
                u.dd * w.v + 2.0 * u.d * w.d + u.v * w.dd,
            )
        # division
        if _any(w.v == 0):
            self.fail(node.right, "division by zero")
        v = u.v / w.v
        d = (u.d - v * w.d) / w.v
        dd = (u.dd - 2.0 * d * w.d - v * w.dd) / w.v
        return _Jet(v, d, dd)

    def intpow(self, node: _Pow) -> _Jet:
        n = node.exponent
        u = self.run(node.base)
        if n == 0:
            one = np.ones_like(u.v) if isinstance(u.v, np.ndarray) else (u.v * 0 + 1.0)
            return _Jet(one, 0.0, 0.0)
        if n == 1:
            return u
        if n < 0 and _any(u.v == 0):
            self.fail(node.base, "zero raised to a negative power")
        # p = t^(n-2) so that value, f', f'' share one power evaluation
        t = u.v
        p = t ** (n - 2) if n != 2 else (np.ones_like(t) if isinstance(t, np.ndarray) else 1.0)
        f = p * t * t
        f1 = n * p * t
        f2 = n * (n - 1) * p
        return _Jet(f, f1 * u.d, f2 * u.d * u.d + f1 * u.dd)

    def call(self, node: _Call) -> _Jet:
        u = self.run(node.arg)
        t = u.v
        name = node.func
        if name == "exp":
            e = np.exp(t)
            f, f1, f2 = e, e, e
        elif name == "ln":
            if self.is_complex:
                if _any(t == 0):
                    self.fail(node.arg, "log of zero (branch point)")
            elif _any(np.real(t) <= 0):
                self.fail(node.arg, "log of a non-positive number")
            f = np.log(t)
            f1 = 1.0 / t
            f2 = -f1 * f1
        elif name == "sqrt":
            if self.is_complex:
                if _any(t == 0):
                    self.fail(node.arg, "sqrt at zero (branch point)")
            else:
                if _any(t <= 0):
                    self.fail(node.arg, "sqrt of a non-positive number "
                                        "(the derivative is singular at zero)")
            f = np.sqrt(t)
            f1 = 0.5 / f
            f2 = -0.5 * f1 / t
        elif name == "sin":
            f, f1, f2 = np.sin(t), np.cos(t), -np.sin(t)
        elif name == "cos":
            f, f1, f2 = np.cos(t), -np.sin(t), -np.cos(t)
        elif name == "sinh":
            f, f1, f2 = np.sinh(t), np.cosh(t), np.sinh(t)
        elif name == "cosh":
            f, f1, f2 = np.cosh(t), np.sinh(t), np.cosh(t)
        else:  # pragma: no cover - parser admits only known names
            raise UnknownIdentifierError(name, node.span[0])
        return _Jet(f, f1 * u.d, f2 * u.d * u.d + f1 * u.dd)


def _as_mapping(expr: Expr, at) -> Mapping:
    if isinstance(at, Mapping):
        missing = [n for n in expr.vars if n not in at]
        if missing:
            raise ExprError(f"missing values for variables {missing}")
        return at
    if isinstance(at, (tuple, list)):
        if len(at) != len(expr.vars):
            raise ExprError(
                f"expected {len(expr.vars)} values for {expr.vars}, got {len(at)}"
            )
        return dict(zip(expr.vars, at))
    # bare scalar or array: only unambiguous for univariate expressions
    if len(expr.vars) != 1:
        raise ExprError(f"pass a mapping or tuple of values for {expr.vars}")
    return {expr.vars[0]: at}


def _detect_complex(values: Mapping) -> bool:
    for v in values.values():
        if isinstance(v, complex):
            return True
        if isinstance(v, np.ndarray) and np.iscomplexobj(v):
            return True
        if isinstance(v, (np.complexfloating,)):
            return True
    return False


def eval_dual(expr: Expr, at, wrt: str) -> EvalResult:
    """Evaluate ``expr`` with value, d/d(wrt) and d2/d(wrt)2.

    ``at`` maps variable names to scalars or same-shaped numpy arrays (a
    bare scalar/array is accepted for univariate expressions).  Real
    inputs run with real-domain checks; any complex input switches to
    holomorphic evaluation.
    """
    values = _as_mapping(expr, at)
    if wrt not in expr.vars:
        raise ExprError(f"cannot differentiate with respect to {wrt!r}")
    jet = _Evaluator(expr, values, wrt, _detect_complex(values)).run(expr.ast)
    return EvalResult(jet.v, jet.d, jet.dd)


def eval_complex(expr: Expr, z) -> tuple:
    """Evaluate a univariate expression holomorphically; returns (F, F')."""
    if len(expr.vars) != 1:
        raise ExprError("eval_complex needs a univariate expression")
    name = expr.vars[0]
    if isinstance(z, np.ndarray):
        z = z.astype(complex)
    else:
        z = complex(z)
    jet = _Evaluator(expr, {name: z}, name, True).run(expr.ast)
    return jet.v, jet.d
