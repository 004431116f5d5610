"""Expression grammar for coordinate and meridian functions.

Grammar: number | u | v | (expr) | expr (+|-|*|/|^) expr | fn(expr) with
fn in {sin, cos, sinh, cosh, exp, log, sqrt}.  ^ binds tightest and
associates to the right, then unary minus, then * /, then + -.

Expressions are immutable trees; ``parse`` and ``to_string`` round-trip
(parse(to_string(e)) == e), and ``compile_tape`` lowers a tree to the flat
instruction format consumed by the jet kernels.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "exp", "log", "sqrt")
VARIABLES = ("u", "v")


class Expr:
    """Base class for expression nodes; supports arithmetic composition."""

    __slots__ = ()

    def __add__(self, other):
        return BinOp("+", self, as_expr(other))

    def __radd__(self, other):
        return BinOp("+", as_expr(other), self)

    def __sub__(self, other):
        return BinOp("-", self, as_expr(other))

    def __rsub__(self, other):
        return BinOp("-", as_expr(other), self)

    def __mul__(self, other):
        return BinOp("*", self, as_expr(other))

    def __rmul__(self, other):
        return BinOp("*", as_expr(other), self)

    def __truediv__(self, other):
        return BinOp("/", self, as_expr(other))

    def __rtruediv__(self, other):
        return BinOp("/", as_expr(other), self)

    def __pow__(self, other):
        return BinOp("^", self, as_expr(other))

    def __neg__(self):
        if isinstance(self, Const):
            return Const(-self.value)
        return Neg(self)

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Call(Expr):
    fn: str
    arg: Expr


U = Var("u")
V = Var("v")


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float)):
        return Const(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def call(fn: str, arg) -> Call:
    if fn not in FUNCTIONS:
        raise ValueError(f"unknown function {fn!r}")
    return Call(fn, as_expr(arg))


def sin(x):
    return call("sin", x)


def cos(x):
    return call("cos", x)


def sinh(x):
    return call("sinh", x)


def cosh(x):
    return call("cosh", x)


def exp(x):
    return call("exp", x)


def log(x):
    return call("log", x)


def sqrt(x):
    return call("sqrt", x)


def vars_used(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return vars_used(e.arg)
    if isinstance(e, Call):
        return vars_used(e.arg)
    if isinstance(e, BinOp):
        return vars_used(e.left) | vars_used(e.right)
    return set()


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace variables by expressions (used for composition checks)."""
    if isinstance(e, Var):
        return mapping.get(e.name, e)
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, mapping))
    if isinstance(e, Call):
        return Call(e.fn, substitute(e.arg, mapping))
    if isinstance(e, BinOp):
        return BinOp(e.op, substitute(e.left, mapping), substitute(e.right, mapping))
    return e


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"""
    (?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
  | (?P<ws>\s+)
""", re.VERBOSE)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", pos)
        return self.next()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {text!r} after expression", pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.next()
                e = BinOp(text, e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.next()
                e = BinOp(text, e, self.unary())
            else:
                return e

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.next()
            arg = self.unary()
            if isinstance(arg, Const):
                return Const(-arg.value)
            return Neg(arg)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.next()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, text, pos = self.next()
        if kind == "num":
            return Const(float(text))
        if kind == "ident":
            if text in VARIABLES:
                return Var(text)
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            raise ParseError(f"unknown identifier {text!r}", pos)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"expected a value, got {text!r}" if text else "unexpected end of input", pos)


def parse(text: str) -> Expr:
    """Parse expression text; raises ParseError with a byte offset on failure."""
    return _Parser(text).parse()


def parse_meridian(text: str) -> Expr:
    """Parse a meridian function of u alone; v is rejected."""
    e = parse(text)
    if "v" in vars_used(e):
        raise ParseError("variable 'v' is not allowed in a meridian function",
                         text.index("v"))
    return e


# printer precedence levels
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def _fmt_const(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_string(e: Expr) -> str:
    """Render a tree so that parse(to_string(e)) == e."""
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({to_string(e.arg)})"
    if isinstance(e, Neg):
        s = to_string(e.arg)
        if _prec(e.arg) < _PREC["neg"]:
            s = f"({s})"
        return f"-{s}"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        ls = to_string(e.left)
        rs = to_string(e.right)
        if e.op == "^":
            if _prec(e.left) <= p:
                ls = f"({ls})"
            if _prec(e.right) < p and not isinstance(e.right, Neg):
                rs = f"({rs})"
        else:
            if _prec(e.left) < p:
                ls = f"({ls})"
            if _prec(e.right) <= p and not isinstance(e.right, Neg):
                rs = f"({rs})"
        return f"{ls}{e.op}{rs}"
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# tape compilation

OP_CONST = 0
OP_U = 1
OP_V = 2
OP_ADD = 3
OP_SUB = 4
OP_MUL = 5
OP_DIV = 6
OP_NEG = 7
OP_SIN = 8
OP_COS = 9
OP_SINH = 10
OP_COSH = 11
OP_EXP = 12
OP_LOG = 13
OP_SQRT = 14
OP_POWI = 15
OP_POWC = 16

_CALL_OPS = {"sin": OP_SIN, "cos": OP_COS, "sinh": OP_SINH, "cosh": OP_COSH,
             "exp": OP_EXP, "log": OP_LOG, "sqrt": OP_SQRT}
_BIN_OPS = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV}

MAX_INT_EXPONENT = 512


@dataclass(frozen=True)
class Tape:
    """Flat program over jet registers; instruction i writes register i."""

    code: np.ndarray          # (n, 3) int64: opcode, arg1, arg2
    consts: np.ndarray        # float64 constant pool
    source: Expr = field(compare=False, default=None)

    @property
    def n_instructions(self) -> int:
        return len(self.code)


class _TapeBuilder:
    def __init__(self):
        self.code: list[tuple[int, int, int]] = []
        self.consts: list[float] = []
        self.const_index: dict[float, int] = {}

    def emit(self, op: int, a1: int = 0, a2: int = 0) -> int:
        self.code.append((op, a1, a2))
        return len(self.code) - 1

    def const(self, value: float) -> int:
        key = value if value == value else math.nan  # collapse NaN keys
        idx = self.const_index.get(key)
        if idx is None:
            idx = len(self.consts)
            self.consts.append(value)
            self.const_index[key] = idx
        return idx

    def walk(self, e: Expr) -> int:
        if isinstance(e, Const):
            return self.emit(OP_CONST, self.const(e.value))
        if isinstance(e, Var):
            return self.emit(OP_U if e.name == "u" else OP_V)
        if isinstance(e, Neg):
            return self.emit(OP_NEG, self.walk(e.arg))
        if isinstance(e, Call):
            return self.emit(_CALL_OPS[e.fn], self.walk(e.arg))
        if isinstance(e, BinOp):
            if e.op == "^":
                return self._power(e)
            a = self.walk(e.left)
            b = self.walk(e.right)
            return self.emit(_BIN_OPS[e.op], a, b)
        raise TypeError(f"not an expression: {e!r}")

    def _power(self, e: BinOp) -> int:
        exponent = e.right
        if isinstance(exponent, Const):
            value = exponent.value
            if value == int(value) and abs(value) <= MAX_INT_EXPONENT:
                base = self.walk(e.left)
                return self.emit(OP_POWI, base, int(value))
            base = self.walk(e.left)
            return self.emit(OP_POWC, base, self.const(value))
        # general exponent: a^b = exp(b * log(a)), requires a > 0
        base = self.walk(e.left)
        lg = self.emit(OP_LOG, base)
        ex = self.walk(exponent)
        prod = self.emit(OP_MUL, ex, lg)
        return self.emit(OP_EXP, prod)


def compile_tape(e: Expr) -> Tape:
    b = _TapeBuilder()
    b.walk(e)
    code = np.array(b.code, dtype=np.int64).reshape(-1, 3)
    consts = np.array(b.consts if b.consts else [0.0], dtype=np.float64)
    return Tape(code=code, consts=consts, source=e)


# ---------------------------------------------------------------------------
# surfaces as four coordinate expressions

@dataclass(frozen=True)
class SurfaceSpec:
    """An immersion given by four coordinate expressions in u and v."""

    coords: tuple[Expr, Expr, Expr, Expr]
    u_domain: tuple[float, float] | None = None
    v_domain: tuple[float, float] | None = None
    name: str = ""

    def __post_init__(self):
        if len(self.coords) != 4:
            raise ValueError("a surface needs exactly 4 coordinate expressions")
        object.__setattr__(self, "coords", tuple(as_expr(c) for c in self.coords))

    def tapes(self) -> tuple[Tape, Tape, Tape, Tape]:
        return tuple(_tape_cached(c) for c in self.coords)

    def contains(self, u: float, v: float) -> bool:
        if self.u_domain and not (self.u_domain[0] <= u <= self.u_domain[1]):
            return False
        if self.v_domain and not (self.v_domain[0] <= v <= self.v_domain[1]):
            return False
        return True

    def to_json(self) -> dict:
        d = {"coords": [to_string(c) for c in self.coords], "name": self.name}
        if self.u_domain:
            d["u_domain"] = list(self.u_domain)
        if self.v_domain:
            d["v_domain"] = list(self.v_domain)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SurfaceSpec":
        return cls(coords=tuple(parse(s) for s in d["coords"]),
                   u_domain=tuple(d["u_domain"]) if d.get("u_domain") else None,
                   v_domain=tuple(d["v_domain"]) if d.get("v_domain") else None,
                   name=d.get("name", ""))


_TAPE_CACHE: dict[Expr, Tape] = {}


def _tape_cached(e: Expr) -> Tape:
    tape = _TAPE_CACHE.get(e)
    if tape is None:
        tape = compile_tape(e)
        if len(_TAPE_CACHE) > 4096:
            _TAPE_CACHE.clear()
        _TAPE_CACHE[e] = tape
    return tape
