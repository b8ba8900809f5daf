"""Counting-quantified Boolean formulas: parsing, printing, brute-force evaluation.

An instance ``C^{m_n} X_n ... C^{m_1} X_1 . phi`` is true when, counting from
the innermost block outward, each block has at least ``m_i`` satisfying
assignments of the level below.  Instance files look like::

    blocks 2
    block 1 vars a b threshold 1
    block 2 vars c threshold 2
    formula (a & b) | !c
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

__all__ = [
    "Var", "Not", "And", "Or", "PropFormula",
    "CountingInstance",
    "FormulaSyntaxError", "InstanceError", "CapacityError",
    "parse_instance", "parse_formula", "format_formula",
    "eval_formula", "count_models", "eval_phi_i", "truth_value",
    "formula_vars", "compile_formula",
    "DEFAULT_ENUMERATION_CAP",
]

DEFAULT_ENUMERATION_CAP = 24

Assignment = Mapping[str, int]


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class InstanceError(ValueError):
    """Well-formed text describing an invalid instance."""


class CapacityError(RuntimeError):
    """Brute force would exceed a configured enumeration or width cap."""


# ------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    child: "PropFormula"


@dataclass(frozen=True)
class And:
    left: "PropFormula"
    right: "PropFormula"


@dataclass(frozen=True)
class Or:
    left: "PropFormula"
    right: "PropFormula"


PropFormula = Union[Var, Not, And, Or]

_PREC = {Or: 1, And: 2, Not: 3, Var: 4}


def format_formula(phi: PropFormula) -> str:
    """Canonical text with the fewest parentheses the grammar allows."""
    if isinstance(phi, Var):
        return phi.name
    if isinstance(phi, Not):
        inner = format_formula(phi.child)
        if _PREC[type(phi.child)] < _PREC[Not]:
            inner = f"({inner})"
        return "!" + inner
    op = " & " if isinstance(phi, And) else " | "
    mine = _PREC[type(phi)]
    left = format_formula(phi.left)
    if _PREC[type(phi.left)] < mine:
        left = f"({left})"
    right = format_formula(phi.right)
    # operators associate to the left, so an equal-precedence right child
    # needs parentheses to survive the round trip
    if _PREC[type(phi.right)] <= mine:
        right = f"({right})"
    return left + op + right


def formula_vars(phi: PropFormula) -> List[str]:
    """Variables in order of first occurrence."""
    seen: Dict[str, None] = {}
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            seen.setdefault(node.name)
        elif isinstance(node, Not):
            stack.append(node.child)
        else:
            stack.append(node.right)
            stack.append(node.left)
    return list(seen)


# ---------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|([!&|()]))")
_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class _FormulaParser:
    def __init__(self, text: str, line: int, col0: int):
        self.text = text
        self.line = line
        self.col0 = col0
        self.tokens: List[Tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN_RE.match(text, pos)
            if not m:
                col = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise FormulaSyntaxError(
                    f"unexpected character {text[col]!r}", line, col0 + col + 1)
            tok = m.group(1) or m.group(2)
            start = m.end() - len(tok)
            self.tokens.append((tok, col0 + start + 1))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def _col(self) -> int:
        if self.i < len(self.tokens):
            return self.tokens[self.i][1]
        return self.col0 + len(self.text.rstrip()) + 1

    def _take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> PropFormula:
        if not self.tokens:
            raise FormulaSyntaxError("empty formula", self.line, self._col())
        node = self._or()
        if self._peek() is not None:
            raise FormulaSyntaxError(f"unexpected {self._peek()!r}", self.line, self._col())
        return node

    def _or(self) -> PropFormula:
        node = self._and()
        while self._peek() == "|":
            self._take()
            node = Or(node, self._and())
        return node

    def _and(self) -> PropFormula:
        node = self._unary()
        while self._peek() == "&":
            self._take()
            node = And(node, self._unary())
        return node

    def _unary(self) -> PropFormula:
        tok = self._peek()
        if tok == "!":
            self._take()
            return Not(self._unary())
        if tok == "(":
            _, col = self._take()
            try:
                node = self._or()
            except FormulaSyntaxError as exc:
                if self._peek() is None:
                    raise FormulaSyntaxError("unclosed parenthesis", self.line, col) from exc
                raise
            if self._peek() != ")":
                raise FormulaSyntaxError(
                    f"unclosed parenthesis opened at column {col}", self.line, self._col())
            self._take()
            return node
        if tok is None:
            raise FormulaSyntaxError("unexpected end of formula", self.line, self._col())
        if _IDENT_RE.match(tok):
            self._take()
            return Var(tok)
        raise FormulaSyntaxError(f"unexpected {tok!r}", self.line, self._col())


def parse_formula(text: str, line: int = 1, column: int = 0) -> PropFormula:
    return _FormulaParser(text, line, column).parse()


# --------------------------------------------------------------- instance


@dataclass(frozen=True)
class CountingInstance:
    formula: PropFormula
    blocks: Tuple[Tuple[str, ...], ...]
    thresholds: Tuple[int, ...]
    _index: Dict[str, Tuple[int, int]] = field(
        init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))
        object.__setattr__(self, "thresholds", tuple(int(m) for m in self.thresholds))
        if not self.blocks:
            raise InstanceError("at least one block is required")
        if len(self.blocks) != len(self.thresholds):
            raise InstanceError("one threshold per block is required")
        index: Dict[str, Tuple[int, int]] = {}
        for bi, block in enumerate(self.blocks):
            if not block:
                raise InstanceError(f"block {bi + 1} is empty")
            for vi, name in enumerate(block):
                if not _IDENT_RE.match(name):
                    raise InstanceError(f"bad variable name {name!r}")
                if name in index:
                    raise InstanceError(f"duplicate variable {name!r}")
                index[name] = (bi, vi)
        for m in self.thresholds:
            if m < 0:
                raise InstanceError("thresholds must be non-negative")
        for name in formula_vars(self.formula):
            if name not in index:
                raise InstanceError(f"variable {name!r} is not in any block")
        object.__setattr__(self, "_index", index)

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def block_sizes(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def s(self, i: int) -> int:
        """``s_i = sum_{j <= i} (l_j + 1)``; ``s_0 = 0``."""
        return sum(l + 1 for l in self.block_sizes[:i])

    def block_of(self, name: str) -> int:
        return self._index[name][0]

    def serialize(self) -> str:
        lines = [f"blocks {self.n}"]
        for i, (block, m) in enumerate(zip(self.blocks, self.thresholds), start=1):
            lines.append(f"block {i} vars {' '.join(block)} threshold {m}")
        lines.append(f"formula {format_formula(self.formula)}")
        return "\n".join(lines) + "\n"

    @property
    def encoded_length(self) -> int:
        return len(self.serialize().encode("utf-8"))

    @property
    def padded_length(self) -> int:
        """``|u|`` for the padded word ``<0^(2^n), w>``."""
        return (1 << self.n) + self.encoded_length


_BLOCKS_RE = re.compile(r"^blocks\s+(\S+)\s*$")
_BLOCK_RE = re.compile(r"^block\s+(\S+)\s+vars\s+(.*?)\s+threshold\s+(\S+)\s*$")


def parse_instance(text: str) -> CountingInstance:
    lines = [(no, raw) for no, raw in enumerate(text.splitlines(), start=1)
             if raw.strip() and not raw.lstrip().startswith("#")]
    if not lines:
        raise FormulaSyntaxError("empty instance", 1, 1)

    def expect_int(tok: str, no: int, col: int, what: str) -> int:
        if not re.fullmatch(r"\d+", tok):
            raise FormulaSyntaxError(f"{what} must be a non-negative integer, got {tok!r}", no, col)
        return int(tok)

    no, raw = lines[0]
    m = _BLOCKS_RE.match(raw)
    if not m:
        raise FormulaSyntaxError("expected 'blocks <n>'", no, 1)
    n = expect_int(m.group(1), no, m.start(1) + 1, "block count")
    if n < 1:
        raise FormulaSyntaxError("block count must be at least 1", no, m.start(1) + 1)
    if len(lines) != n + 2:
        where = lines[min(len(lines) - 1, n + 1)]
        raise FormulaSyntaxError(
            f"expected {n} block lines and one formula line", where[0], 1)

    blocks: List[Tuple[str, ...]] = []
    thresholds: List[int] = []
    seen: Dict[str, int] = {}
    for k, (no, raw) in enumerate(lines[1:n + 1], start=1):
        m = _BLOCK_RE.match(raw)
        if not m:
            raise FormulaSyntaxError("expected 'block <i> vars <id>+ threshold <m>'", no, 1)
        idx = expect_int(m.group(1), no, m.start(1) + 1, "block index")
        if idx != k:
            raise FormulaSyntaxError(f"expected block index {k}", no, m.start(1) + 1)
        names = m.group(2).split()
        col = m.start(2)
        for name in names:
            col = raw.index(name, col) + 1
            if not _IDENT_RE.match(name):
                raise FormulaSyntaxError(f"bad identifier {name!r}", no, col)
            if name in seen:
                raise FormulaSyntaxError(f"duplicate variable {name!r}", no, col)
            seen[name] = k
        blocks.append(tuple(names))
        thresholds.append(expect_int(m.group(3), no, m.start(3) + 1, "threshold"))

    no, raw = lines[-1]
    stripped = raw.lstrip()
    if not stripped.startswith("formula") or (len(stripped) > 7 and not stripped[7].isspace()):
        raise FormulaSyntaxError("expected 'formula <expr>'", no, 1)
    offset = len(raw) - len(stripped) + 7
    phi = parse_formula(raw[offset:], line=no, column=offset)
    for name in formula_vars(phi):
        if name not in seen:
            col = _find_var_column(raw, name, offset)
            raise FormulaSyntaxError(f"variable {name!r} is not in any block", no, col)
    return CountingInstance(phi, tuple(blocks), tuple(thresholds))


def _find_var_column(raw: str, name: str, offset: int) -> int:
    m = re.search(rf"(?<![A-Za-z0-9_]){re.escape(name)}(?![A-Za-z0-9_])", raw[offset:])
    return offset + (m.start() if m else 0) + 1


# ------------------------------------------------------------- evaluation


def eval_formula(phi: PropFormula, a: Assignment) -> int:
    if isinstance(phi, Var):
        try:
            return 1 if a[phi.name] else 0
        except KeyError:
            raise KeyError(f"variable {phi.name!r} missing from assignment") from None
    if isinstance(phi, Not):
        return 1 - eval_formula(phi.child, a)
    if isinstance(phi, And):
        return eval_formula(phi.left, a) & eval_formula(phi.right, a)
    return eval_formula(phi.left, a) | eval_formula(phi.right, a)


def compile_formula(phi: PropFormula, order: Sequence[str]) -> Callable[[Sequence[int]], int]:
    """A fast evaluator taking bits positionally in ``order``."""
    pos = {name: i for i, name in enumerate(order)}

    def build(node):
        if isinstance(node, Var):
            k = pos[node.name]
            return lambda bits: bits[k]
        if isinstance(node, Not):
            c = build(node.child)
            return lambda bits: 1 - c(bits)
        l, r = build(node.left), build(node.right)
        if isinstance(node, And):
            return lambda bits: l(bits) & r(bits)
        return lambda bits: l(bits) | r(bits)

    return build(phi)


def _check_cap(size: int, cap: int) -> None:
    if size > cap:
        raise CapacityError(f"block of {size} variables exceeds enumeration cap {cap}")


def count_models(phi: PropFormula, block: Sequence[str], fixed: Assignment,
                 cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """Number of completions of ``fixed`` over ``block`` that satisfy ``phi``."""
    _check_cap(len(block), cap)
    a = dict(fixed)
    total = 0
    for bits in itertools.product((0, 1), repeat=len(block)):
        a.update(zip(block, bits))
        total += eval_formula(phi, a)
    return total


def eval_phi_i(inst: CountingInstance, i: int, outer: Assignment = (),
               cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """Truth value of the ``i`` innermost counting quantifiers under ``outer``.

    ``eval_phi_i(inst, inst.n, {})`` is the truth value of the instance.
    """
    if not 0 <= i <= inst.n:
        raise ValueError(f"level {i} outside 0..{inst.n}")
    outer = dict(outer)
    if i == 0:
        return eval_formula(inst.formula, outer)
    block = inst.blocks[i - 1]
    _check_cap(len(block), cap)
    count = 0
    for bits in itertools.product((0, 1), repeat=len(block)):
        outer.update(zip(block, bits))
        count += eval_phi_i(inst, i - 1, outer, cap)
    return 1 if count >= inst.thresholds[i - 1] else 0


def truth_value(inst: CountingInstance, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    return eval_phi_i(inst, inst.n, {}, cap)


def instance_from_parts(formula: str, blocks: Iterable[Iterable[str]],
                        thresholds: Iterable[int]) -> CountingInstance:
    """Convenience constructor used by tests and corpus generation."""
    return CountingInstance(parse_formula(formula), tuple(tuple(b) for b in blocks),
                            tuple(thresholds))


__all__.append("instance_from_parts")
