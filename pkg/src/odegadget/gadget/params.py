"""Polynomials and the scale parameters of a gadget."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Sequence, Tuple

from ..bump import BUMP, DEFAULT_MAX_ORDER
from ..diffeq import NormalizedGadget

__all__ = ["Polynomial", "GadgetParams", "ParameterError", "make_params",
           "capped_s", "SIGMA_CAP"]

# d_u(p) above this many base-B digits is refused
SIGMA_CAP = 1 << 16


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Polynomial:
    """``coeffs[0] + coeffs[1] x + ...`` with non-negative integer coefficients."""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(v) for v in self.coeffs)
        if any(v < 0 for v in c):
            raise ValueError("polynomial coefficients must be non-negative")
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c or (0,))

    @classmethod
    def const(cls, c: int) -> "Polynomial":
        return cls((c,))

    @classmethod
    def identity(cls) -> "Polynomial":
        return cls((0, 1))

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        """Parse sums like ``"2x+2"``, ``"x^2 + 3"``, ``"x"``."""
        coeffs = {}
        for term in text.replace(" ", "").split("+"):
            m = re.fullmatch(r"(\d*)\*?(x(?:\^(\d+))?)?", term)
            if not term or not m or (not m.group(1) and not m.group(2)):
                raise ValueError(f"bad polynomial term {term!r} in {text!r}")
            c = int(m.group(1)) if m.group(1) else 1
            deg = 0 if not m.group(2) else int(m.group(3) or 1)
            coeffs[deg] = coeffs.get(deg, 0) + c
        top = max(coeffs)
        return cls(tuple(coeffs.get(d, 0) for d in range(top + 1)))

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        size = max(len(a), len(b))
        return Polynomial(tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                                for i in range(size)))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """``self(inner(x))``."""
        acc = Polynomial.const(0)
        for c in reversed(self.coeffs):
            acc = acc * inner + Polynomial.const(c)
        return acc

    def __str__(self) -> str:
        parts = []
        for d in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[d]
            if c == 0 and len(self.coeffs) > 1:
                continue
            mono = "" if d == 0 else ("x" if d == 1 else f"x^{d}")
            parts.append(f"{c}{mono}" if c != 1 or not mono else mono)
        return " + ".join(parts)


def capped_s(m: int) -> int:
    """Bump bound exponent, frozen at the largest tabulated order past the cap."""
    return BUMP.s(min(m, DEFAULT_MAX_ORDER))


@dataclass(frozen=True)
class GadgetParams:
    k: int
    p: int
    q: int
    r: int
    size: int                  # |u|
    gamma: Polynomial
    log2B: int
    d: Tuple[int, ...]         # d_u(0) .. d_u(p)
    s: Tuple[int, ...]
    mode: str = "faithful"
    j_u: Callable[[int], int] = field(default=lambda T: 0, compare=False, repr=False)

    @property
    def B(self) -> int:
        return 1 << self.log2B

    @property
    def sigma(self) -> int:
        return self.d[self.p]

    @property
    def rho(self) -> int:
        """``h_u(1) = 2**-rho * L(u)``."""
        return self.sigma * self.log2B

    def mu(self, i: int) -> int:
        """Exponent of the bound on ``D^i g~``: ``(i+1) q + s(i+1)``."""
        return (i + 1) * self.q + capped_s(i + 1)

    def digit_exp(self, i: int) -> int:
        """``log2 B**d_u(i)``."""
        return self.log2B * self.d[i]


def positioning(k: int, p: int, variant: str = "auto") -> Tuple[int, ...]:
    if variant == "auto":
        variant = "linear" if k == 1 else "exponential"
    if variant == "linear":
        return tuple(range(p + 1))
    if variant != "exponential":
        raise ParameterError(f"unknown positioning variant {variant!r}")
    sigma = (k + 1) ** p
    if sigma > SIGMA_CAP:
        raise ParameterError(f"sigma = {k + 1}^{p} exceeds cap {SIGMA_CAP}")
    return tuple((k + 1) ** i for i in range(p)) + (sigma,)


def make_params(ng: NormalizedGadget, k: int, gamma: Polynomial,
                mode: str = "faithful", size: int = None,
                variant: str = "auto", value_bits: int = None) -> GadgetParams:
    """Scale parameters for a normalized gadget.

    ``size`` defaults to the padded length of the underlying instance.  In
    ``toy`` mode ``value_bits`` (an upper bound on the bit length of every
    grid value) replaces the cell size exponent, and ``B`` shrinks to the
    smallest power of two that keeps the derivative margin and the digits
    apart.
    """
    if k < 1:
        raise ParameterError("k must be at least 1")
    if k > DEFAULT_MAX_ORDER:
        raise ParameterError(f"k = {k} above the derivative cap {DEFAULT_MAX_ORDER}")
    if mode not in ("faithful", "toy"):
        raise ParameterError(f"unknown mode {mode!r}")
    if size is None:
        inst = ng.equation.meta.get("instance")
        if inst is None:
            raise ParameterError("size not given and gadget carries no instance")
        size = inst.padded_length
    p = ng.p
    s = tuple(BUMP.s(m) for m in range(DEFAULT_MAX_ORDER + 1))
    g = gamma(size)
    if mode == "faithful":
        r = size
        log2B = g + r + s[k] + k + 3
    else:
        if value_bits is None:
            raise ParameterError("toy mode needs value_bits")
        r = value_bits
        log2B = max(g + s[k] + k + 1, r + 3)
    return GadgetParams(k=k, p=p, q=ng.q, r=r, size=size, gamma=gamma, log2B=log2B,
                        d=positioning(k, p, variant), s=s, mode=mode, j_u=ng.j_u)
