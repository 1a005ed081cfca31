"""Vertex expressions and metric formulas.

Two small languages live here.  Vertex expressions are the sigil strings
attached to database vertices (``+2850``, ``=0``, ``&InfiniBand``) and are
applied to a metric map while a configuration graph is traversed.  Formulas
are arithmetic/boolean expressions over metric names, used for derived
metrics (``nodes = ceil(1000000 / node_peak_performance)``) and constraints
(``'InfiniBand' in network_tech``).

The grammar is written down in ``docs/grammar.md``.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Union

Value = Union[float, str, frozenset]
Metrics = dict

IDENT_RE = re.compile(r"[a-z_][a-z0-9_]*\Z")
_NUMBER_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?\Z")

FUNCTIONS = ("ceil", "floor", "round", "min", "max", "sqrt", "log2", "abs")
KEYWORDS = ("and", "or", "not", "in", "true", "false")
RESERVED = frozenset(FUNCTIONS + KEYWORDS)


class ExprError(Exception):
    pass


class ExprParseError(ExprError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class EvalError(ExprError):
    pass


class UnknownMetricError(EvalError):
    def __init__(self, name):
        super().__init__(f"unknown metric '{name}'")
        self.name = name


class ExprTypeError(EvalError):
    pass


class DivisionByZero(EvalError):
    pass


def is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def is_identifier(name: str) -> bool:
    return bool(IDENT_RE.match(name))


def round_half_away(x: float) -> float:
    return math.copysign(math.floor(abs(x) + 0.5), x)


# ---------------------------------------------------------------------------
# vertex expressions
# ---------------------------------------------------------------------------

class Op(enum.Enum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    ASSIGN_NUMBER = "="
    ASSIGN_TEXT = "text"
    APPEND_TEXT = "&"


_NUMERIC_OPS = {"+": Op.ADD, "-": Op.SUB, "*": Op.MUL, "=": Op.ASSIGN_NUMBER}


@dataclass(frozen=True)
class VertexExpr:
    metric: str
    op: Op
    operand: Value

    def __str__(self):
        if self.op is Op.ASSIGN_TEXT:
            return f"{self.metric}={self.operand!r}"
        return f"{self.metric}={self.op.value}{self.operand!r}"


def parse_vertex_expr(metric_name: str, surface: str) -> VertexExpr:
    """Turn ``("node_cost", "+2850")`` into ``VertexExpr(node_cost, ADD, 2850.0)``."""
    if not is_identifier(metric_name):
        raise ExprParseError(f"invalid metric name {metric_name!r}")
    if not surface:
        raise ExprParseError(f"empty expression for metric '{metric_name}'", 0)
    sigil, rest = surface[0], surface[1:]
    if sigil in _NUMERIC_OPS:
        text = rest.strip()
        if not _NUMBER_RE.match(text):
            raise ExprParseError(
                f"expected a number after '{sigil}' in expression for '{metric_name}', got {rest!r}", 1)
        value = float(text)
        if not math.isfinite(value):
            raise ExprParseError(f"non-finite number in expression for '{metric_name}'", 1)
        return VertexExpr(metric_name, _NUMERIC_OPS[sigil], value)
    if sigil == "&":
        return VertexExpr(metric_name, Op.APPEND_TEXT, rest)
    return VertexExpr(metric_name, Op.ASSIGN_TEXT, surface)


def apply(expr: VertexExpr, m: Metrics) -> Metrics:
    """Return a copy of ``m`` with ``expr`` applied to its target metric.

    A missing metric counts as 0 for the arithmetic operations.
    """
    out = dict(m)
    name, op, operand = expr.metric, expr.op, expr.operand
    current = m.get(name)
    if op in (Op.ADD, Op.SUB, Op.MUL):
        if current is None:
            current = 0.0
        elif not is_number(current):
            raise ExprTypeError(f"cannot apply '{op.value}' to non-numeric metric '{name}'")
        if op is Op.ADD:
            result = current + operand
        elif op is Op.SUB:
            result = current - operand
        else:
            result = current * operand
        if not math.isfinite(result):
            raise EvalError(f"metric '{name}' overflowed")
        out[name] = float(result)
    elif op is Op.ASSIGN_NUMBER:
        out[name] = float(operand)
    elif op is Op.ASSIGN_TEXT:
        out[name] = operand
    else:
        if current is None:
            out[name] = frozenset([operand])
        elif isinstance(current, frozenset):
            out[name] = current | {operand}
        elif isinstance(current, str):
            out[name] = frozenset([current, operand])
        else:
            raise ExprTypeError(f"cannot append text to numeric metric '{name}'")
    return out


# ---------------------------------------------------------------------------
# formula AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


@dataclass(frozen=True)
class Formula:
    body: object
    target: str | None = None
    source: str = field(default="", compare=False)

    @property
    def is_definition(self) -> bool:
        return self.target is not None

    def names(self) -> set:
        return _names(self.body)


def _names(node) -> set:
    if isinstance(node, Name):
        return {node.id}
    if isinstance(node, Unary):
        return _names(node.operand)
    if isinstance(node, Binary):
        return _names(node.left) | _names(node.right)
    if isinstance(node, Call):
        out = set()
        for a in node.args:
            out |= _names(a)
        return out
    return set()


COMPARISONS = ("<", "<=", ">", ">=", "==", "!=")
_UNICODE_OPS = {"≤": "<=", "≥": ">=", "≠": "!="}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[a-z_][a-z0-9_]*)
  | (?P<string>'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*")
  | (?P<op><=|>=|==|!=|[-+*/^(),<>=≤≥≠])
""", re.VERBOSE | re.DOTALL)

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"'}


def _unescape(body: str, pos: int) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise ExprParseError(f"unknown escape '\\{nxt}'", pos + i + 1)
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprParseError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        text = m.group()
        if kind == "number" and m.end() < len(source) and (source[m.end()].isalpha() or source[m.end()] == "_"):
            raise ExprParseError(f"malformed number {text + source[m.end()]!r}", pos)
        if kind == "string":
            tokens.append(("string", _unescape(text[1:-1], pos + 1), pos))
        elif kind == "op":
            tokens.append(("op", _UNICODE_OPS.get(text, text), pos))
        elif kind == "name":
            tokens.append(("kw" if text in KEYWORDS else "name", text, pos))
        elif kind == "number":
            tokens.append(("number", text, pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at(self, kind, text=None):
        tok = self.tokens[self.i]
        return tok[0] == kind and (text is None or tok[1] == text)

    def expect(self, kind, text):
        tok = self.next()
        if tok[0] != kind or tok[1] != text:
            raise ExprParseError(f"expected '{text}', found {_describe(tok)}", tok[2])
        return tok

    def formula(self) -> Formula:
        target = None
        if self.at("name") and self.tokens[self.i + 1][:2] == ("op", "="):
            tok = self.next()
            if tok[1] in RESERVED:
                raise ExprParseError(f"'{tok[1]}' is a reserved name and cannot be a metric", tok[2])
            target = tok[1]
            self.next()
        body = self.disjunction()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprParseError(f"unexpected {_describe(tok)}", tok[2])
        return Formula(body, target, self.source)

    def disjunction(self):
        node = self.conjunction()
        while self.at("kw", "or"):
            self.next()
            node = Binary("or", node, self.conjunction())
        return node

    def conjunction(self):
        node = self.negation()
        while self.at("kw", "and"):
            self.next()
            node = Binary("and", node, self.negation())
        return node

    def negation(self):
        if self.at("kw", "not"):
            self.next()
            return Unary("not", self.negation())
        return self.comparison()

    def comparison(self):
        node = self.additive()
        tok = self.peek()
        if tok[0] == "op" and tok[1] in COMPARISONS:
            self.next()
            node = Binary(tok[1], node, self.additive())
        elif tok[0] == "kw" and tok[1] == "in":
            self.next()
            node = Binary("in", node, self.additive())
        tok = self.peek()
        if (tok[0] == "op" and tok[1] in COMPARISONS) or tok[:2] == ("kw", "in"):
            raise ExprParseError("comparisons cannot be chained; use 'and'", tok[2])
        if tok[:2] == ("op", "="):
            raise ExprParseError("'=' only allowed after a metric name at the start; use '==' to compare", tok[2])
        return node

    def additive(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.next()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.next()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        if self.at("op", "-"):
            self.next()
            return Unary("-", self.unary())
        return self.power()

    def power(self):
        node = self.primary()
        if self.at("op", "^"):
            self.next()
            node = Binary("^", node, self.unary())
        return node

    def primary(self):
        tok = self.next()
        kind, text, pos = tok
        if kind == "number":
            value = float(text)
            if not math.isfinite(value):
                raise ExprParseError(f"number out of range: {text}", pos)
            return Num(value)
        if kind == "string":
            return Str(text)
        if kind == "kw" and text in ("true", "false"):
            return Bool(text == "true")
        if kind == "name":
            if self.at("op", "("):
                if text not in FUNCTIONS:
                    raise ExprParseError(f"unknown function '{text}'", pos)
                self.next()
                args = []
                if not self.at("op", ")"):
                    args.append(self.disjunction())
                    while self.at("op", ","):
                        self.next()
                        args.append(self.disjunction())
                self.expect("op", ")")
                _check_arity(text, len(args), pos)
                return Call(text, tuple(args))
            if text in FUNCTIONS:
                raise ExprParseError(f"'{text}' is a function and cannot be used as a metric", pos)
            return Name(text)
        if kind == "op" and text == "(":
            node = self.disjunction()
            self.expect("op", ")")
            return node
        raise ExprParseError(f"unexpected {_describe(tok)}", pos)


def _describe(tok):
    kind, text, _ = tok
    if kind == "end":
        return "end of input"
    if kind == "string":
        return f"string {text!r}"
    return f"'{text}'"


def _check_arity(func, n, pos):
    if func in ("min", "max"):
        if n < 1:
            raise ExprParseError(f"{func}() needs at least one argument", pos)
    elif n != 1:
        raise ExprParseError(f"{func}() takes exactly one argument, got {n}", pos)


def parse_formula(source: str) -> Formula:
    if not source or not source.strip():
        raise ExprParseError("empty formula", 0)
    return _Parser(source).formula()


# ---------------------------------------------------------------------------
# unparsing
# ---------------------------------------------------------------------------

def _quote(s: str) -> str:
    return "'" + s.replace("\\", "\\\\").replace("'", "\\'") + "'"


def unparse(node) -> str:
    """Fully parenthesised source for a formula or AST node."""
    if isinstance(node, Formula):
        body = unparse(node.body)
        return f"{node.target} = {body}" if node.target else body
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Str):
        return _quote(node.value)
    if isinstance(node, Bool):
        return "true" if node.value else "false"
    if isinstance(node, Name):
        return node.id
    if isinstance(node, Unary):
        sep = " " if node.op == "not" else ""
        return f"({node.op}{sep}{unparse(node.operand)})"
    if isinstance(node, Binary):
        return f"({unparse(node.left)} {node.op} {unparse(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(unparse(a) for a in node.args)})"
    raise TypeError(f"not a formula node: {node!r}")


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _type_name(v):
    if isinstance(v, bool):
        return "boolean"
    if is_number(v):
        return "number"
    if isinstance(v, str):
        return "text"
    return "text set"


def _num(v, what):
    if not is_number(v):
        raise ExprTypeError(f"{what} expects a number, got {_type_name(v)}")
    return float(v)


def _bool(v, what):
    if not isinstance(v, bool):
        raise ExprTypeError(f"'{what}' expects a boolean, got {_type_name(v)}")
    return v


def _finite(x, what):
    if isinstance(x, complex) or not math.isfinite(x):
        raise EvalError(f"{what} produced a non-finite result")
    return x


def _call(func, args):
    if func in ("min", "max"):
        nums = [_num(a, f"{func}()") for a in args]
        return min(nums) if func == "min" else max(nums)
    x = _num(args[0], f"{func}()")
    if func == "ceil":
        return float(math.ceil(x))
    if func == "floor":
        return float(math.floor(x))
    if func == "round":
        return round_half_away(x)
    if func == "abs":
        return abs(x)
    if func == "sqrt":
        if x < 0:
            raise EvalError(f"sqrt() of negative number {x}")
        return math.sqrt(x)
    if x <= 0:
        raise EvalError(f"log2() of non-positive number {x}")
    return math.log2(x)


def _eval(node, m):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, (Str, Bool)):
        return node.value
    if isinstance(node, Name):
        try:
            return m[node.id]
        except KeyError:
            raise UnknownMetricError(node.id) from None
    if isinstance(node, Unary):
        v = _eval(node.operand, m)
        if node.op == "not":
            return not _bool(v, "not")
        return -_num(v, "unary '-'")
    if isinstance(node, Call):
        return _call(node.func, [_eval(a, m) for a in node.args])
    op = node.op
    if op == "and":
        return _bool(_eval(node.left, m), op) and _bool(_eval(node.right, m), op)
    if op == "or":
        return _bool(_eval(node.left, m), op) or _bool(_eval(node.right, m), op)
    left = _eval(node.left, m)
    right = _eval(node.right, m)
    if op == "in":
        if not isinstance(left, str):
            raise ExprTypeError(f"left side of 'in' must be text, got {_type_name(left)}")
        if isinstance(right, frozenset):
            return left in right
        if isinstance(right, str):
            return left == right
        raise ExprTypeError(f"right side of 'in' must be text or a text set, got {_type_name(right)}")
    if op in ("==", "!="):
        if _type_name(left) != _type_name(right):
            raise ExprTypeError(f"cannot compare {_type_name(left)} with {_type_name(right)}")
        return (left == right) == (op == "==")
    if op in ("<", "<=", ">", ">="):
        a, b = _num(left, f"'{op}'"), _num(right, f"'{op}'")
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
    a, b = _num(left, f"'{op}'"), _num(right, f"'{op}'")
    if op == "+":
        return _finite(a + b, "'+'")
    if op == "-":
        return _finite(a - b, "'-'")
    if op == "*":
        return _finite(a * b, "'*'")
    if op == "/":
        if b == 0:
            raise DivisionByZero("division by zero")
        return _finite(a / b, "'/'")
    if a == 0 and b < 0:
        raise DivisionByZero("zero raised to a negative power")
    try:
        return _finite(math.pow(a, b), "'^'")
    except (OverflowError, ValueError):
        raise EvalError(f"'^' is undefined for {a} ^ {b}") from None


def eval_formula(f, m: Metrics):
    """Evaluate a formula (or its source text) against a metric map.

    Returns a number, text, text set or boolean.  Missing metrics, type
    mismatches, division by zero and non-finite results all raise
    ``EvalError`` subclasses.
    """
    if isinstance(f, str):
        f = parse_formula(f)
    body = f.body if isinstance(f, Formula) else f
    return _eval(body, m)


def as_metric_value(v) -> Value:
    """Coerce a formula result into something storable in a metric map."""
    if isinstance(v, bool):
        return 1.0 if v else 0.0
    if is_number(v):
        return float(v)
    return v
