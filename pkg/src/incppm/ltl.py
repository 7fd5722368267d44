"""LTL over finite traces: formula AST, parser, evaluator and case labelling.

Concrete syntax::

    F(x)  G(x)  x U y  !x  x & y  x | y  x -> y  ( ... )

Precedence is unary > U > & > | > ->; ``U`` and ``->`` associate to the
right. Atoms are bare words (``[A-Za-z0-9_.]+``, not ``F``/``G``/``U``) or
double-quoted strings for labels with spaces or punctuation.
"""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from typing import Sequence, Union

from .event_log import EventLog


@dataclass(frozen=True)
class Atom:
    label: str

    def __str__(self):
        escaped = self.label.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'


@dataclass(frozen=True)
class Not:
    arg: "Formula"

    def __str__(self):
        return f"!({self.arg})"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} -> {self.right})"


@dataclass(frozen=True)
class Eventually:
    arg: "Formula"

    def __str__(self):
        return f"F({self.arg})"


@dataclass(frozen=True)
class Globally:
    arg: "Formula"

    def __str__(self):
        return f"G({self.arg})"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return f"({self.left} U {self.right})"


Formula = Union[Atom, Not, And, Or, Implies, Eventually, Globally, Until]


class LtlSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# --------------------------------------------------------------------------- parser

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<op>[!&|()])
  | (?P<quoted>"(?:[^"\\]|\\.)*")
  | (?P<word>[A-Za-z0-9_.]+)
""", re.VERBOSE)

_KEYWORDS = {"F", "G", "U"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos] == '"':
                raise LtlSyntaxError("unterminated string", pos)
            raise LtlSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "quoted":
            value = re.sub(r"\\(.)", r"\1", m.group()[1:-1])
            tokens.append(("atom", value, pos))
        elif kind == "word":
            word = m.group()
            tokens.append((word, word, pos) if word in _KEYWORDS else ("atom", word, pos))
        elif kind != "ws":
            tokens.append((m.group(), m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            found = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise LtlSyntaxError(f"expected {kind!r}, found {found}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        f = self.implies()
        self.take("eof")
        return f

    def implies(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.until()
        while self.peek() == "&":
            self.take()
            f = And(f, self.until())
        return f

    def until(self):
        left = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(left, self.until())
        return left

    def unary(self):
        kind, value, pos = self.tokens[self.i]
        if kind == "!":
            self.take()
            return Not(self.unary())
        if kind == "F":
            self.take()
            return Eventually(self.unary())
        if kind == "G":
            self.take()
            return Globally(self.unary())
        if kind == "(":
            self.take()
            f = self.implies()
            self.take(")")
            return f
        if kind == "atom":
            self.take()
            label = value.strip()
            if not label:
                raise LtlSyntaxError("empty activity label", pos)
            return Atom(label)
        found = "end of input" if kind == "eof" else repr(value)
        raise LtlSyntaxError(f"expected a formula, found {found}", pos)


def parse_formula(text: str) -> Formula:
    return _Parser(text).parse()


# --------------------------------------------------------------------------- semantics

def _truth(f: Formula, trace: Sequence[str]) -> list[bool]:
    """Truth value of ``f`` at every position of ``trace`` (backward pass)."""
    n = len(trace)
    if isinstance(f, Atom):
        target = f.label.strip()
        return [label == target for label in trace]
    if isinstance(f, Not):
        return [not v for v in _truth(f.arg, trace)]
    if isinstance(f, (And, Or, Implies, Until)):
        a, b = _truth(f.left, trace), _truth(f.right, trace)
        if isinstance(f, And):
            return [x and y for x, y in zip(a, b)]
        if isinstance(f, Or):
            return [x or y for x, y in zip(a, b)]
        if isinstance(f, Implies):
            return [(not x) or y for x, y in zip(a, b)]
        out, nxt = [False] * n, False
        for i in range(n - 1, -1, -1):
            nxt = b[i] or (a[i] and nxt)
            out[i] = nxt
        return out
    if isinstance(f, (Eventually, Globally)):
        a = _truth(f.arg, trace)
        out = [False] * n
        acc = isinstance(f, Globally)
        for i in range(n - 1, -1, -1):
            acc = (acc and a[i]) if isinstance(f, Globally) else (acc or a[i])
            out[i] = acc
        return out
    raise TypeError(f"not a formula: {f!r}")


def evaluate(formula: Formula, trace: Sequence[str]) -> bool:
    if len(trace) == 0:
        raise ValueError("cannot evaluate a formula on an empty trace")
    return _truth(formula, [label.strip() for label in trace])[0]


def label_log(log: EventLog, formula: Formula) -> dict[str, bool]:
    labels = {}
    for case in log.cases:
        if not case.events:
            raise ValueError(f"case {case.case_id!r} has no events")
        labels[case.case_id] = evaluate(formula, case.activities)
    return labels


def labels_to_csv(labels: dict[str, bool]) -> bytes:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case_id", "label"])
    for cid, lab in labels.items():
        w.writerow([cid, "true" if lab else "false"])
    return buf.getvalue().encode("utf-8")
