"""Scalar expression trees over chart coordinates.

Expressions are immutable and hashable.  They can be parsed from a small infix
grammar, simplified conservatively, differentiated exactly, evaluated with a
tree walk, or compiled into a Python function that evaluates a whole batch of
expressions with common-subexpression sharing.

Grammar (lowest to highest precedence)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom ('^' unary)?          # right associative
    atom    := number | name | name '(' args ')' | '(' sum ')'

Supported calls are ``sin cos tan sinh cosh tanh exp log sqrt pow``; the named
constants are ``pi`` and ``e`` (a declared coordinate of the same name wins).
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

__all__ = [
    "Expr", "Const", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow", "Call",
    "ExprError", "ExprSyntaxError", "UnknownIdentifier", "ArityError",
    "DomainError", "NonFiniteWarning",
    "parse", "differentiate", "evaluate", "simplify", "compile_exprs", "to_string",
    "as_expr", "const", "var", "PI", "E", "ZERO", "ONE",
    "sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt",
]


class ExprError(Exception):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifier(ExprError):
    def __init__(self, name: str, offset: int = -1):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r}" + (f" at offset {offset}" if offset >= 0 else ""))


class ArityError(ExprError):
    pass


class DomainError(ExprError, ArithmeticError):
    """Evaluation left the domain of a function (log/sqrt of a negative, 1/0, ...)."""


class NonFiniteWarning(RuntimeWarning):
    pass


# --------------------------------------------------------------------------
# nodes


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __pow__(self, other):
        return power(self, as_expr(other))

    def __rpow__(self, other):
        return power(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __str__(self):
        return to_string(self)

    def diff(self, coord: str) -> Expr:
        return differentiate(self, coord)

    def eval(self, point: Sequence[float] = ()) -> float:
        return evaluate(self, point)

    def children(self) -> tuple[Expr, ...]:
        return ()

    def size(self) -> int:
        seen = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.extend(node.children())
        return len(seen)


def _hashed(cls):
    # Structural hash computed once; trees are immutable so this is safe.
    def __post_init__(self):
        object.__setattr__(self, "_h", hash((cls.__name__,) + tuple(
            getattr(self, f) for f in cls._fields)))

    def __hash__(self):
        return self._h

    cls.__post_init__ = __post_init__
    cls.__hash__ = __hash__
    return cls


@_hashed
@dataclass(frozen=True, eq=True, repr=False)
class Const(Expr):
    value: float
    name: str | None = None
    _h: int = field(init=False, compare=False, default=0)
    _fields = ("value", "name")

    def __repr__(self):
        if self.name:
            return self.name
        v = self.value
        return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)


@_hashed
@dataclass(frozen=True, eq=True, repr=False)
class Var(Expr):
    name: str
    index: int
    _h: int = field(init=False, compare=False, default=0)
    _fields = ("name", "index")

    def __repr__(self):
        return self.name


@_hashed
@dataclass(frozen=True, eq=True, repr=False)
class Neg(Expr):
    arg: Expr
    _h: int = field(init=False, compare=False, default=0)
    _fields = ("arg",)

    def children(self):
        return (self.arg,)

    def __repr__(self):
        return f"Neg({self.arg!r})"


class BinOp(Expr):
    __slots__ = ()
    symbol = "?"

    def children(self):
        return (self.left, self.right)

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r},{self.right!r})"


def _binop(name, symbol):
    cls = type(name, (BinOp,), {
        "__annotations__": {"left": Expr, "right": Expr, "_h": int},
        "_h": field(init=False, compare=False, default=0),
        "symbol": symbol,
        "_fields": ("left", "right"),
        "__repr__": BinOp.__repr__,
    })
    return _hashed(dataclass(frozen=True, eq=True, repr=False)(cls))


Add = _binop("Add", "+")
Sub = _binop("Sub", "-")
Mul = _binop("Mul", "*")
Div = _binop("Div", "/")
Pow = _binop("Pow", "^")


@_hashed
@dataclass(frozen=True, eq=True, repr=False)
class Call(Expr):
    func: str
    args: tuple
    _h: int = field(init=False, compare=False, default=0)
    _fields = ("func", "args")

    def children(self):
        return self.args

    def __repr__(self):
        return f"{self.func}(" + ",".join(repr(a) for a in self.args) + ")"


FUNCTIONS = {
    "sin": 1, "cos": 1, "tan": 1, "sinh": 1, "cosh": 1, "tanh": 1,
    "exp": 1, "log": 1, "sqrt": 1, "pow": 2,
}

PI = Const(math.pi, "pi")
E = Const(math.e, "e")
ZERO = Const(0.0)
ONE = Const(1.0)
TWO = Const(2.0)


def const(v: float) -> Const:
    return Const(float(v))


def var(name: str, index: int = 0) -> Var:
    return Var(name, index)


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float)) or hasattr(x, "__float__"):
        return Const(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def _is_const(e, v=None):
    return isinstance(e, Const) and (v is None or e.value == v)


def _is_int(e):
    return isinstance(e, Const) and float(e.value).is_integer()


# --------------------------------------------------------------------------
# primitive evaluation (shared by the tree walk and by folding, so results
# are bit-identical)


def _checked_pow(a: float, b: float) -> float:
    if a < 0.0 and not float(b).is_integer():
        raise DomainError(f"negative base {a!r} to non-integer power {b!r}")
    if a == 0.0 and b < 0.0:
        raise DomainError("zero to a negative power")
    try:
        return a ** b
    except OverflowError:
        return math.inf


def _checked_log(a):
    if a <= 0.0:
        raise DomainError(f"log of non-positive argument {a!r}")
    return math.log(a)


def _checked_sqrt(a):
    if a < 0.0:
        raise DomainError(f"sqrt of negative argument {a!r}")
    return math.sqrt(a)


def _checked_div(a, b):
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


def _overflowing(fn):
    def wrapped(a):
        try:
            return fn(a)
        except OverflowError:
            return math.inf if a > 0 or fn is math.cosh else -math.inf
    return wrapped


_UNARY_IMPL: dict[str, Callable[[float], float]] = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "sinh": _overflowing(math.sinh), "cosh": _overflowing(math.cosh), "tanh": math.tanh,
    "exp": _overflowing(math.exp), "log": _checked_log, "sqrt": _checked_sqrt,
}


# --------------------------------------------------------------------------
# smart constructors: conservative simplification


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if isinstance(b, Neg):
        return sub(a, b.arg)
    if isinstance(a, Neg):
        return sub(b, a.arg)
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    if isinstance(b, Neg):
        return add(a, b.arg)
    if a == b:
        return ZERO
    return Sub(a, b)


def _base_exp(e: Expr) -> tuple[Expr, Expr]:
    if isinstance(e, Pow) and isinstance(e.right, Const):
        return e.left, e.right
    return e, ONE


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if isinstance(b, Const):
        a, b = b, a
    if isinstance(a, Const):
        if a.value == 0.0:
            return ZERO
        if a.value == 1.0:
            return b
        if a.value == -1.0:
            return neg(b)
        if isinstance(b, Mul) and isinstance(b.left, Const):
            return mul(Const(a.value * b.left.value), b.right)
        if isinstance(b, Neg):
            return mul(Const(-a.value), b.arg)
        return Mul(a, b)
    if isinstance(a, Neg):
        return neg(mul(a.arg, b))
    if isinstance(b, Neg):
        return neg(mul(a, b.arg))
    if isinstance(b, Mul) and isinstance(b.left, Const):
        return mul(b.left, mul(a, b.right))
    if isinstance(a, Mul) and isinstance(a.left, Const):
        return mul(a.left, mul(a.right, b))
    # merge like powers: x^p * x^q -> x^(p+q) for constant p, q
    ba, ea = _base_exp(a)
    bb, eb = _base_exp(b)
    if ba == bb and not isinstance(ba, Const):
        return power(ba, Const(ea.value + eb.value))
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return Const(a.value / b.value)
    if _is_const(b, 1.0):
        return a
    if _is_const(b, -1.0):
        return neg(a)
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return ZERO
    if isinstance(a, Neg):
        return neg(div(a.arg, b))
    if isinstance(b, Neg):
        return neg(div(a, b.arg))
    return Div(a, b)


def power(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        try:
            return Const(_checked_pow(a.value, b.value))
        except DomainError:
            return Pow(a, b)
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return ONE
    if isinstance(a, Pow) and _is_int(a.right) and _is_int(b):
        return power(a.left, Const(a.right.value * b.value))
    return Pow(a, b)


def call(func: str, *args: Expr) -> Expr:
    if func not in FUNCTIONS:
        raise UnknownIdentifier(func)
    if len(args) != FUNCTIONS[func]:
        raise ArityError(f"{func} expects {FUNCTIONS[func]} argument(s), got {len(args)}")
    if func == "pow":
        return power(args[0], args[1])
    (a,) = args
    if isinstance(a, Const):
        try:
            return Const(_UNARY_IMPL[func](a.value))
        except DomainError:
            pass
    return Call(func, (a,))


def sin(a): return call("sin", as_expr(a))
def cos(a): return call("cos", as_expr(a))
def tan(a): return call("tan", as_expr(a))
def sinh(a): return call("sinh", as_expr(a))
def cosh(a): return call("cosh", as_expr(a))
def tanh(a): return call("tanh", as_expr(a))
def exp(a): return call("exp", as_expr(a))
def log(a): return call("log", as_expr(a))
def sqrt(a): return call("sqrt", as_expr(a))


def simplify(e: Expr) -> Expr:
    """Rebuild ``e`` bottom-up through the simplifying constructors."""
    memo: dict[int, Expr] = {}

    def go(n: Expr) -> Expr:
        key = id(n)
        if key in memo:
            return memo[key]
        if isinstance(n, (Const, Var)):
            out = n
        elif isinstance(n, Neg):
            out = neg(go(n.arg))
        elif isinstance(n, BinOp):
            out = _BUILD[type(n)](go(n.left), go(n.right))
        else:
            out = call(n.func, *(go(a) for a in n.args))
        memo[key] = out
        return out

    return go(e)


_BUILD = {Add: add, Sub: sub, Mul: mul, Div: div, Pow: power}


# --------------------------------------------------------------------------
# printing


def to_string(e: Expr) -> str:
    """Fully parenthesised infix; ``parse(to_string(e))`` evaluates identically."""
    if isinstance(e, Const):
        if e.name:
            return e.name
        v = e.value
        if math.isnan(v) or math.isinf(v):
            raise ValueError(f"cannot print non-finite constant {v!r}")
        return repr(v) if v >= 0.0 and not (v == 0.0 and math.copysign(1.0, v) < 0) else f"(-{repr(-v)})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_string(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_string(e.left)} {e.symbol} {to_string(e.right)})"
    return f"{e.func}(" + ", ".join(to_string(a) for a in e.args) + ")"


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(source: str):
    pos = 0
    tokens = []
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(source, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", _byte_offset(source, pos), source)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


def _byte_offset(source: str, pos: int) -> int:
    return len(source[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, source: str, coords: Sequence[str]):
        self.source = source
        self.coords = {name: i for i, name in enumerate(coords)}
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, tok, what=None):
        kind, text, pos = tok
        msg = what or (f"unexpected {text!r}" if kind != "end" else "unexpected end of input")
        raise ExprSyntaxError(msg, _byte_offset(self.source, pos), self.source)

    def expect(self, text):
        tok = self.take()
        if tok[1] != text or tok[0] != "op":
            self.error(tok, f"expected {text!r}")
        return tok

    def parse(self) -> Expr:
        e = self.sum()
        tok = self.peek()
        if tok[0] != "end":
            self.error(tok)
        return e

    def sum(self):
        e = self.product()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.product()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def product(self):
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.unary()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Neg(self.unary())
        if tok[0] == "op" and tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Pow(base, self.unary())
        return base

    def atom(self):
        tok = self.take()
        kind, text, pos = tok
        if kind == "num":
            return Const(float(text))
        if kind == "name":
            if text in self.coords:
                return Var(text, self.coords[text])
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                if text not in FUNCTIONS:
                    raise UnknownIdentifier(text, _byte_offset(self.source, pos))
                self.take()
                args = [self.sum()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.sum())
                self.expect(")")
                if len(args) != FUNCTIONS[text]:
                    raise ArityError(
                        f"{text} expects {FUNCTIONS[text]} argument(s), got {len(args)} "
                        f"at offset {_byte_offset(self.source, pos)}")
                if text == "pow":
                    return Pow(args[0], args[1])
                return Call(text, tuple(args))
            if text == "pi":
                return PI
            if text == "e":
                return E
            raise UnknownIdentifier(text, _byte_offset(self.source, pos))
        if kind == "op" and text == "(":
            e = self.sum()
            self.expect(")")
            return e
        self.error(tok)


def parse(source: str, coords: Sequence[str] = ()) -> Expr:
    """Parse ``source`` into an unsimplified expression tree."""
    return _Parser(source, coords).parse()


# --------------------------------------------------------------------------
# differentiation


def differentiate(e: Expr, coord: str | int) -> Expr:
    """Exact partial derivative of ``e`` with respect to a coordinate.

    ``coord`` is either the coordinate name or its index in the chart.
    """
    memo: dict[int, Expr] = {}
    by_name = isinstance(coord, str)

    def d(n: Expr) -> Expr:
        key = id(n)
        if key in memo:
            return memo[key]
        if isinstance(n, Const):
            out = ZERO
        elif isinstance(n, Var):
            hit = n.name == coord if by_name else n.index == coord
            out = ONE if hit else ZERO
        elif isinstance(n, Neg):
            out = neg(d(n.arg))
        elif isinstance(n, Add):
            out = add(d(n.left), d(n.right))
        elif isinstance(n, Sub):
            out = sub(d(n.left), d(n.right))
        elif isinstance(n, Mul):
            out = add(mul(d(n.left), n.right), mul(n.left, d(n.right)))
        elif isinstance(n, Div):
            da, db = d(n.left), d(n.right)
            if _is_const(db, 0.0):
                out = div(da, n.right)
            else:
                out = div(sub(mul(da, n.right), mul(n.left, db)), power(n.right, TWO))
        elif isinstance(n, Pow):
            a, b = n.left, n.right
            da, db = d(a), d(b)
            if isinstance(b, Const):
                out = mul(mul(b, power(a, Const(b.value - 1.0))), da)
            elif _is_const(db, 0.0):
                out = mul(mul(b, power(a, sub(b, ONE))), da)
            elif isinstance(a, Const):
                out = mul(mul(n, call("log", a)), db)
            else:
                out = mul(n, add(mul(db, call("log", a)), div(mul(b, da), a)))
        else:
            out = _d_call(n, d)
        memo[key] = out
        return out

    return d(e)


def _d_call(n: Call, d) -> Expr:
    (a,) = n.args
    da = d(a)
    if _is_const(da, 0.0):
        return ZERO
    f = n.func
    if f == "sin":
        g = call("cos", a)
    elif f == "cos":
        g = neg(call("sin", a))
    elif f == "tan":
        g = div(ONE, power(call("cos", a), TWO))
    elif f == "sinh":
        g = call("cosh", a)
    elif f == "cosh":
        g = call("sinh", a)
    elif f == "tanh":
        g = sub(ONE, power(n, TWO))
    elif f == "exp":
        g = n
    elif f == "log":
        return div(da, a)
    elif f == "sqrt":
        return div(da, mul(TWO, n))
    else:  # pragma: no cover - FUNCTIONS is closed
        raise UnknownIdentifier(f)
    return mul(g, da)


# --------------------------------------------------------------------------
# evaluation


def evaluate(e: Expr, point: Sequence[float] = ()) -> float:
    """Tree-walking evaluation.

    Raises DomainError for log/sqrt of negative arguments and division by
    zero.  Overflow to +-inf or NaN results propagate with a NonFiniteWarning.
    """
    memo: dict[int, float] = {}

    def ev(n: Expr) -> float:
        key = id(n)
        if key in memo:
            return memo[key]
        if isinstance(n, Const):
            v = n.value
        elif isinstance(n, Var):
            try:
                v = float(point[n.index])
            except IndexError:
                raise ExprError(f"point has no coordinate {n.name!r} (index {n.index})") from None
        elif isinstance(n, Neg):
            v = -ev(n.arg)
        elif isinstance(n, Add):
            v = ev(n.left) + ev(n.right)
        elif isinstance(n, Sub):
            v = ev(n.left) - ev(n.right)
        elif isinstance(n, Mul):
            v = ev(n.left) * ev(n.right)
        elif isinstance(n, Div):
            v = _checked_div(ev(n.left), ev(n.right))
        elif isinstance(n, Pow):
            v = _checked_pow(ev(n.left), ev(n.right))
        else:
            v = _UNARY_IMPL[n.func](ev(n.args[0]))
        memo[key] = v
        return v

    out = ev(e)
    if not math.isfinite(out):
        warnings.warn(f"non-finite value {out!r} evaluating {to_string(e)[:80]}", NonFiniteWarning, stacklevel=2)
    return out


def compile_exprs(exprs: Iterable[Expr], nvars: int) -> Callable[[Sequence[float]], tuple]:
    """Compile expressions into one function ``point -> tuple of floats``.

    Shared subtrees are computed once.  The generated code performs the same
    floating-point operations as :func:`evaluate`, so results agree
    bit-for-bit; when the fast path raises, the tree walk is rerun to report
    the precise DomainError.
    """
    exprs = list(exprs)
    lines: list[str] = []
    names: dict[object, str] = {}
    memo: dict[int, str] = {}

    def emit(n: Expr) -> str:
        key = id(n)
        if key in memo:
            return memo[key]
        if isinstance(n, Const):
            s = repr(n.value)
            if n.value < 0 or (n.value == 0.0 and math.copysign(1.0, n.value) < 0):
                s = f"({s})"
            memo[key] = s
            return s
        if isinstance(n, Var):
            s = f"x{n.index}"
            memo[key] = s
            return s
        if isinstance(n, Neg):
            parts = ("neg", emit(n.arg))
            code = f"-{parts[1]}"
        elif isinstance(n, BinOp):
            l, r = emit(n.left), emit(n.right)
            parts = (n.symbol, l, r)
            if isinstance(n, Pow):
                if _is_const(n.right) and float(n.right.value).is_integer() and n.right.value > 0:
                    code = f"{l} ** {r}"
                else:
                    code = f"_pow({l}, {r})"
            elif isinstance(n, Div):
                code = f"{l} / {r}"
            else:
                code = f"{l} {n.symbol} {r}"
        else:
            args = tuple(emit(a) for a in n.args)
            parts = (n.func,) + args
            code = f"_{n.func}({', '.join(args)})"
        name = names.get(parts)
        if name is None:
            name = f"t{len(names)}"
            names[parts] = name
            lines.append(f"    {name} = {code}")
        memo[key] = name
        return name

    outs = [emit(e) for e in exprs]
    unpack = ", ".join(f"x{i}" for i in range(nvars))
    header = ["def _compiled(x):"]
    if nvars:
        header.append(f"    {unpack}{',' if nvars == 1 else ''} = x")
    body = header + lines + [f"    return ({', '.join(outs)}{',' if len(outs) == 1 else ''})"]
    namespace = {
        "_pow": _checked_pow, "inf": math.inf, "nan": math.nan,
        "_sin": math.sin, "_cos": math.cos, "_tan": math.tan,
        "_sinh": math.sinh, "_cosh": math.cosh, "_tanh": math.tanh,
        "_exp": math.exp, "_log": math.log, "_sqrt": math.sqrt,
    }
    exec(compile("\n".join(body), "<einstype-compiled>", "exec"), namespace)
    fast = namespace["_compiled"]

    def run(point: Sequence[float]) -> tuple:
        try:
            return fast(point)
        except (ValueError, ZeroDivisionError, OverflowError, DomainError):
            return tuple(evaluate(e, point) for e in exprs)

    run.size = len(lines)
    return run
