"""Difference equations ``H(i+1, T+1) - H(i+1, T) = G(i, T, H(i, T))``.

A difference equation has height ``P`` (rows of ``G``), width ``Q`` (columns)
and cell size ``R`` (values of ``H`` live in ``[0, R)``).  The solution grid
starts from zeros in row 0 and column 0; its bottom-right cell ``H(P, Q)`` is
the output.

:func:`build_gadget` turns a counting instance into such an equation whose
output is the instance's truth value, and :func:`normalize` rewrites any
equation so that exactly one row acts per column and every row but the top
returns to zero at the end.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, TextIO

from .formula import (CapacityError, CountingInstance, DEFAULT_ENUMERATION_CAP,
                      compile_formula)

__all__ = [
    "DifferenceEquation", "SolutionGrid", "NormalizedGadget", "BitLayout",
    "CellOverflowError", "solve", "recognize", "bit_range", "build_gadget",
    "normalize", "inject_fault", "dump_grid", "dump_table",
    "DEFAULT_WIDTH_CAP",
]

DEFAULT_WIDTH_CAP = 1 << 20

Step = Callable[[int, int, int], int]


class CellOverflowError(ArithmeticError):
    def __init__(self, i: int, T: int, value: int, cell_size: int):
        super().__init__(f"H({i}, {T}) = {value} leaves [0, {cell_size})")
        self.i = i
        self.T = T
        self.value = value


@dataclass(frozen=True)
class DifferenceEquation:
    height: int
    width: int
    cell_size: int
    step: Step
    # optional column -> row map; when given, rows other than active_row(T)
    # are promised to be zero and solve skips them
    active_row: Optional[Callable[[int], int]] = None
    label: str = ""
    meta: Dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.height < 1 or self.width < 1 or self.cell_size < 1:
            raise ValueError("height, width and cell size must be positive")

    @classmethod
    def from_table(cls, table: Dict, height: int, width: int, cell_size: int,
                   label: str = "") -> "DifferenceEquation":
        """``table`` maps ``(i, T, Y)`` or ``(i, T)`` to a step value; missing keys are 0."""
        def step(i, T, Y):
            v = table.get((i, T, Y))
            return table.get((i, T), 0) if v is None else v
        return cls(height, width, cell_size, step, label=label)


class SolutionGrid:
    """``H`` stored column-major: ``columns[T][i] == H(i, T)``."""

    __slots__ = ("columns", "height", "width")

    def __init__(self, columns: List[List[int]]):
        self.columns = columns
        self.width = len(columns) - 1
        self.height = len(columns[0]) - 1

    def __call__(self, i: int, T: int) -> int:
        return self.columns[T][i]

    def row(self, i: int) -> List[int]:
        return [col[i] for col in self.columns]

    def row_max(self, i: int) -> int:
        return max(col[i] for col in self.columns)

    def __eq__(self, other) -> bool:
        return isinstance(other, SolutionGrid) and self.columns == other.columns


def solve(eq: DifferenceEquation) -> SolutionGrid:
    P, Q, R = eq.height, eq.width, eq.cell_size
    step = eq.step
    active = eq.active_row
    col = [0] * (P + 1)
    columns = [col]
    for T in range(Q):
        nxt = col[:]
        rows = range(P) if active is None else (active(T),)
        for i in rows:
            g = step(i, T, col[i])
            if g:
                if g not in (-1, 1):
                    raise ValueError(f"G({i}, {T}, {col[i]}) = {g} is not in {{-1, 0, 1}}")
                v = col[i + 1] + g
                if not 0 <= v < R:
                    raise CellOverflowError(i + 1, T + 1, v, R)
                nxt[i + 1] = v
        columns.append(nxt)
        col = nxt
    return SolutionGrid(columns)


def recognize(eq: DifferenceEquation) -> int:
    sol = solve(eq)
    return sol(eq.height, eq.width)


def bit_range(T: int, i: int, j: int) -> str:
    """The bits ``T_{j-1} ... T_i`` of ``T`` (bit 0 least significant)."""
    if i > j:
        raise ValueError("need i <= j")
    return "".join(str((T >> b) & 1) for b in range(j - 1, i - 1, -1))


# ------------------------------------------------------------------ gadget


class BitLayout(enum.Enum):
    """How column indices ``T`` are read by the counting gadget.

    ``PINNED``: the low bit ``T_0`` is not part of any window, so columns with
    ``T_0 = 1`` are switched off; each assignment is then counted once.
    ``LITERAL``: the formulas read as written, leaving ``T_0`` free, which
    counts every assignment twice in row 1.
    For the top row, whose sign bit sits past ``s_n``, the bit is read as 0.
    """

    PINNED = "pinned"
    LITERAL = "literal"


def build_gadget(inst: CountingInstance, layout: BitLayout = BitLayout.PINNED,
                 width_cap: int = DEFAULT_WIDTH_CAP,
                 cap: int = DEFAULT_ENUMERATION_CAP) -> DifferenceEquation:
    """Logarithmic-height equation whose output is the truth value of ``inst``."""
    n = inst.n
    sizes = inst.block_sizes
    s = [inst.s(i) for i in range(n + 1)]
    if sum(sizes) > cap:
        raise CapacityError(f"{sum(sizes)} variables exceed enumeration cap {cap}")
    width = (1 << s[n]) + 1
    if width > width_cap:
        raise CapacityError(f"width 2^{s[n]}+1 exceeds width cap {width_cap}")

    order = [v for block in inst.blocks for v in block]
    phi = compile_formula(inst.formula, order)
    total = len(order)
    table = bytearray(1 << total)
    for idx in range(1 << total):
        bits = [(idx >> (total - 1 - k)) & 1 for k in range(total)]
        table[idx] = phi(bits)

    # block b occupies bits s_{b-1}+1 .. s_b-1, first variable most significant
    windows = [(s[b] + 1, (1 << sizes[b]) - 1, sizes[b]) for b in range(n)]
    pinned = layout is BitLayout.PINNED
    masks = [None] + [((1 << s[i]) - 1, 1 << (s[i] - 1)) for i in range(1, n + 1)]

    def sign_bit(T: int, pos: int) -> int:
        return -1 if (T >> pos) & 1 else 1

    def step(i: int, T: int, Y: int) -> int:
        if pinned and T & 1:
            return 0
        if i == 0:
            idx = 0
            for lo, mask, size in windows:
                idx = (idx << size) | ((T >> lo) & mask)
            if not table[idx]:
                return 0
            return sign_bit(T, s[1])
        mask, want = masks[i]
        if (T >> 1) & mask != want:
            return 0
        if Y < inst.thresholds[i - 1]:
            return 0
        pos = s[i + 1] if i < n else s[n] + 1
        return sign_bit(T, pos)

    return DifferenceEquation(
        height=n + 1, width=width, cell_size=1 << inst.padded_length, step=step,
        label=f"G_u[{layout.value}]",
        meta={"instance": inst, "layout": layout},
    )


# --------------------------------------------------------------- normalize


@dataclass(frozen=True)
class NormalizedGadget:
    equation: DifferenceEquation
    j_u: Callable[[int], int]
    original: DifferenceEquation
    serial: int            # sub-columns per original column in the forward phase
    q: int                 # equation.width == 2**q

    @property
    def p(self) -> int:
        return self.equation.height

    def macro_column(self, T: int) -> int:
        """Column of the normalized grid matching original column ``T``."""
        return T * self.serial


def normalize(eq: DifferenceEquation) -> NormalizedGadget:
    P, Q = eq.height, eq.width
    step = eq.step
    forward = Q * P
    back_rows = P - 1
    backward = Q * back_rows
    used = forward + backward
    q = max(0, (used - 1).bit_length())
    width = 1 << q

    def locate(c: int):
        # (row, original column, sign) acting in normalized column c
        if c < forward:
            T, k = divmod(c, P)
            return P - 1 - k, T, 1       # top-down: row j still holds H(j, T)
        if c < used:
            idx, k = divmod(c - forward, back_rows)
            return k, Q - 1 - idx, -1    # bottom-up undo of column Q-1-idx
        return 0, None, 0

    def j_u(c: int) -> int:
        return locate(c)[0] if 0 <= c < width else 0

    def nstep(i: int, c: int, Y: int) -> int:
        j, T, sign = locate(c)
        if T is None or i != j:
            return 0
        return sign * step(j, T, Y)

    neq = DifferenceEquation(
        height=P, width=width, cell_size=eq.cell_size, step=nstep,
        active_row=j_u, label=f"normalized({eq.label})", meta=dict(eq.meta),
    )
    return NormalizedGadget(neq, j_u, eq, P, q)


# ------------------------------------------------------------------ faults


def inject_fault(eq: DifferenceEquation, i: int, T: int, mode: str = "negate") -> DifferenceEquation:
    """Copy of ``eq`` with the step at ``(i, T)`` corrupted.

    ``negate`` flips the sign; ``toggle`` maps 0 to 1 and nonzero to 0.
    """
    base = eq.step

    def step(r, c, Y):
        g = base(r, c, Y)
        if r == i and c == T:
            if mode == "negate":
                return -g
            if mode == "toggle":
                return 0 if g else 1
            raise ValueError(f"unknown fault mode {mode!r}")
        return g

    active = eq.active_row
    if active is not None:
        old = active
        active = (lambda c: i if c == T else old(c)) if mode == "toggle" else old
    return DifferenceEquation(eq.height, eq.width, eq.cell_size, step, active,
                              label=f"{eq.label}+fault({mode}@{i},{T})",
                              meta=dict(eq.meta, fault=(i, T, mode)))


# --------------------------------------------------------------------- csv


def dump_grid(sol: SolutionGrid, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["i", "T", "H"])
    for T, col in enumerate(sol.columns):
        for i, v in enumerate(col):
            w.writerow([i, T, v])


def dump_table(eq: DifferenceEquation, sol: SolutionGrid, out: TextIO) -> None:
    """Nonzero steps along the solution, as sparse ``i,T,Y,G`` rows."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["i", "T", "Y", "G"])
    for T in range(eq.width):
        rows = range(eq.height) if eq.active_row is None else (eq.active_row(T),)
        for i in rows:
            Y = sol(i, T)
            g = eq.step(i, T, Y)
            if g:
                w.writerow([i, T, Y, g])
