"""Parser, classifier and evaluator for problem-definition expressions.

Grammar (whitespace-insensitive, no implicit multiplication):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := number | 'x' | 't' | '(' expr ')' | 'exp' '(' expr ')'
            | factor '^' number | '-' factor

Exponents are unsigned real literals, division is only by constant
subexpressions, and ``exp`` takes an affine argument a*x + b*t + c.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import EvaluationError, ParseError


# -- abstract syntax tree ---------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str  # 'x' or 't'


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*', '/'
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: float


@dataclass(frozen=True)
class Exp:
    arg: object


@dataclass(frozen=True)
class Expression:
    """A parsed expression together with its source text."""

    root: object
    text: str

    def __call__(self, x=0.0, t=0.0) -> float:
        return evaluate(self, x, t)


@dataclass(frozen=True)
class MonomialSum:
    """Finite sum of c * x**p * t**q monomials, merged and sorted."""

    terms: tuple[tuple[float, float, float], ...]  # (coeff, xpow, tpow)

    def __call__(self, x: float, t: float) -> float:
        return math.fsum(c * x ** p * t ** q for c, p, q in self.terms)

    @property
    def is_time_independent(self) -> bool:
        return all(q == 0 for _, _, q in self.terms)

    @classmethod
    def from_terms(cls, triples) -> "MonomialSum":
        merged: dict[tuple[float, float], float] = {}
        for c, p, q in triples:
            key = (float(p), float(q))
            merged[key] = merged.get(key, 0.0) + float(c)
        cleaned = tuple(
            (c, p, q) for (p, q), c in sorted(merged.items()) if c != 0.0)
        return cls(cleaned)


@dataclass(frozen=True)
class Classification:
    kind: str  # "monomial-sum" or "general"
    monomials: MonomialSum | None = None


# -- tokenizer --------------------------------------------------------------

_NUMBER = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_]\w*")


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        """(kind, value, offset) of the next token without consuming it."""
        self._skip_ws()
        if self.pos >= len(self.text):
            return ("end", "", self.pos)
        m = _NUMBER.match(self.text, self.pos)
        if m:
            return ("number", m.group(), self.pos)
        m = _IDENT.match(self.text, self.pos)
        if m:
            return ("ident", m.group(), self.pos)
        return ("op", self.text[self.pos], self.pos)

    def take(self):
        kind, value, offset = self.peek()
        self.pos = offset + len(value) if kind != "end" else offset
        return kind, value, offset


# -- parser -----------------------------------------------------------------

_BIN_ADD = ("+", "-")
_BIN_MUL = ("*", "/")


class _Parser:
    def __init__(self, text: str):
        self.tok = _Tokenizer(text)
        self.text = text

    def parse(self):
        node = self._expr()
        kind, value, offset = self.tok.peek()
        if kind != "end":
            raise ParseError(
                f"unexpected {value!r}", offset,
                ("+", "-", "*", "/", "^", "end of input"))
        return node

    def _expr(self):
        node = self._term()
        while True:
            kind, value, _ = self.tok.peek()
            if kind == "op" and value in _BIN_ADD:
                self.tok.take()
                node = BinOp(value, node, self._term())
            else:
                return node

    def _term(self):
        node = self._factor()
        while True:
            kind, value, _ = self.tok.peek()
            if kind == "op" and value in _BIN_MUL:
                self.tok.take()
                _, _, offset = self.tok.peek()
                rhs = self._factor()
                if value == "/" and _contains_symbol(rhs):
                    raise ParseError(
                        "division is only allowed by constants", offset,
                        ("number",))
                node = BinOp(value, node, rhs)
            else:
                return node

    def _factor(self):
        kind, value, offset = self.tok.peek()
        if kind == "op" and value == "-":
            self.tok.take()
            return Neg(self._factor())
        node = self._primary()
        while True:
            kind, value, _ = self.tok.peek()
            if kind == "op" and value == "^":
                self.tok.take()
                kind, value, offset = self.tok.take()
                if kind != "number":
                    raise ParseError(
                        "exponent must be a real literal", offset, ("number",))
                node = Pow(node, float(value))
            else:
                return node

    def _primary(self):
        kind, value, offset = self.tok.take()
        if kind == "number":
            return Num(float(value))
        if kind == "ident":
            if value in ("x", "t"):
                return Var(value)
            if value == "exp":
                self._expect_op("(")
                arg = self._expr()
                self._expect_op(")")
                if _affine_coefficients(arg) is None:
                    raise ParseError(
                        "exp argument must be affine in x and t", offset)
                return Exp(arg)
            raise ParseError(
                f"unknown symbol {value!r}", offset, ("x", "t", "exp"))
        if kind == "op" and value == "(":
            node = self._expr()
            self._expect_op(")")
            return node
        shown = value if kind != "end" else "end of input"
        raise ParseError(
            f"unexpected {shown!r}", offset,
            ("number", "x", "t", "exp", "(", "-"))

    def _expect_op(self, op: str):
        kind, value, offset = self.tok.take()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", offset, (op,))


def _contains_symbol(node) -> bool:
    if isinstance(node, (Var, Exp)):
        return True
    if isinstance(node, Num):
        return False
    if isinstance(node, Neg):
        return _contains_symbol(node.arg)
    if isinstance(node, Pow):
        return _contains_symbol(node.base)
    if isinstance(node, BinOp):
        return _contains_symbol(node.left) or _contains_symbol(node.right)
    return True


def _affine_coefficients(node):
    """(a, b, c) with node == a*x + b*t + c, or None if not affine."""
    if isinstance(node, Num):
        return (0.0, 0.0, node.value)
    if isinstance(node, Var):
        return (1.0, 0.0, 0.0) if node.name == "x" else (0.0, 1.0, 0.0)
    if isinstance(node, Neg):
        inner = _affine_coefficients(node.arg)
        return None if inner is None else tuple(-v for v in inner)
    if isinstance(node, BinOp):
        left = _affine_coefficients(node.left)
        right = _affine_coefficients(node.right)
        if left is None or right is None:
            return None
        if node.op == "+":
            return tuple(l + r for l, r in zip(left, right))
        if node.op == "-":
            return tuple(l - r for l, r in zip(left, right))
        if node.op == "*":
            if left[0] == left[1] == 0.0:
                return tuple(left[2] * v for v in right)
            if right[0] == right[1] == 0.0:
                return tuple(right[2] * v for v in left)
            return None
        if node.op == "/":
            if right[0] == right[1] == 0.0 and right[2] != 0.0:
                return tuple(v / right[2] for v in left)
            return None
    return None


def parse(text: str) -> Expression:
    """Parse the expression grammar; raises ``ParseError`` with offset."""
    if not isinstance(text, str):
        raise ParseError("expected an expression string", 0)
    return Expression(_Parser(text).parse(), text)


# -- classification ---------------------------------------------------------

_MAX_EXPANSION_POWER = 16


def _monomials(node) -> dict | None:
    """Map (xpow, tpow) -> coeff if the node is a finite monomial sum."""
    if isinstance(node, Num):
        return {(0.0, 0.0): node.value}
    if isinstance(node, Var):
        key = (1.0, 0.0) if node.name == "x" else (0.0, 1.0)
        return {key: 1.0}
    if isinstance(node, Neg):
        inner = _monomials(node.arg)
        return None if inner is None else {k: -v for k, v in inner.items()}
    if isinstance(node, Exp):
        return None
    if isinstance(node, Pow):
        base = _monomials(node.base)
        if base is None:
            return None
        e = node.exponent
        if len(base) == 1:
            ((p, q), c), = base.items()
            if c < 0 and e != round(e):
                return None
            return {(p * e, q * e): c ** e}
        if e == round(e) and 0 <= e <= _MAX_EXPANSION_POWER:
            acc = {(0.0, 0.0): 1.0}
            for _ in range(int(round(e))):
                acc = _merge_product(acc, base)
            return acc
        return None
    if isinstance(node, BinOp):
        left = _monomials(node.left)
        right = _monomials(node.right)
        if left is None or right is None:
            return None
        if node.op == "+":
            return _merge_sum(left, right, 1.0)
        if node.op == "-":
            return _merge_sum(left, right, -1.0)
        if node.op == "*":
            return _merge_product(left, right)
        if node.op == "/":
            if set(right) <= {(0.0, 0.0)}:
                d = right.get((0.0, 0.0), 0.0)
                if d == 0.0:
                    return None
                return {k: v / d for k, v in left.items()}
            return None
    return None


def _merge_sum(a: dict, b: dict, sign: float) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0.0) + sign * v
    return out


def _merge_product(a: dict, b: dict) -> dict:
    out: dict = {}
    for (p1, q1), c1 in a.items():
        for (p2, q2), c2 in b.items():
            key = (p1 + p2, q1 + q2)
            out[key] = out.get(key, 0.0) + c1 * c2
    return out


def classify(expr: Expression) -> Classification:
    """MonomialSum iff the tree normalizes to a finite sum of c*x^p*t^q."""
    table = _monomials(expr.root)
    if table is None:
        return Classification("general")
    triples = [(c, p, q) for (p, q), c in table.items()]
    return Classification("monomial-sum", MonomialSum.from_terms(triples))


# -- evaluation ---------------------------------------------------------------

def _eval_node(node, x: float, t: float) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x if node.name == "x" else t
    if isinstance(node, Neg):
        return -_eval_node(node.arg, x, t)
    if isinstance(node, Exp):
        return math.exp(_eval_node(node.arg, x, t))
    if isinstance(node, Pow):
        base = _eval_node(node.base, x, t)
        try:
            return math.pow(base, node.exponent)  # math.pow(0, 0) == 1
        except ValueError as exc:
            raise EvaluationError(
                f"cannot raise {base!r} to {node.exponent!r}") from exc
    if isinstance(node, BinOp):
        left = _eval_node(node.left, x, t)
        right = _eval_node(node.right, x, t)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        try:
            return left / right
        except ZeroDivisionError as exc:
            raise EvaluationError("division by zero") from exc
    raise EvaluationError(f"cannot evaluate node {node!r}")


def evaluate(expr: Expression, x: float = 0.0, t: float = 0.0) -> float:
    """IEEE-double evaluation with 0**0 == 1; non-finite results are flagged."""
    try:
        value = _eval_node(expr.root, float(x), float(t))
    except OverflowError as exc:
        raise EvaluationError("evaluation overflowed") from exc
    if not math.isfinite(value):
        raise EvaluationError(
            f"non-finite value {value!r} from {expr.text!r} at x={x}, t={t}")
    return value


def _eval_node_mp(node, x, t):
    import mpmath as mp

    if isinstance(node, Num):
        return mp.mpf(node.value)
    if isinstance(node, Var):
        return x if node.name == "x" else t
    if isinstance(node, Neg):
        return -_eval_node_mp(node.arg, x, t)
    if isinstance(node, Exp):
        return mp.exp(_eval_node_mp(node.arg, x, t))
    if isinstance(node, Pow):
        base = _eval_node_mp(node.base, x, t)
        if base == 0 and node.exponent == 0:
            return mp.mpf(1)
        return mp.power(base, node.exponent)
    if isinstance(node, BinOp):
        left = _eval_node_mp(node.left, x, t)
        right = _eval_node_mp(node.right, x, t)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if right == 0:
            raise EvaluationError("division by zero")
        return left / right
    raise EvaluationError(f"cannot evaluate node {node!r}")


def evaluate_mp(expr: Expression, x, t=0.0):
    """Evaluation in mpmath arithmetic at the caller's working precision."""
    return _eval_node_mp(expr.root, x, t)


def references_time(expr: Expression) -> bool:
    """True when the tree mentions the variable t."""
    def walk(node) -> bool:
        if isinstance(node, Var):
            return node.name == "t"
        if isinstance(node, (Num,)):
            return False
        if isinstance(node, Neg):
            return walk(node.arg)
        if isinstance(node, Exp):
            return walk(node.arg)
        if isinstance(node, Pow):
            return walk(node.base)
        if isinstance(node, BinOp):
            return walk(node.left) or walk(node.right)
        return False
    return walk(expr.root)
