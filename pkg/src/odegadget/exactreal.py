"""Exact binary rationals, outward-rounded intervals and real-number names.

A *name* of a real ``x`` answers every precision query ``n`` with a multiple
of ``2**-n`` equal to ``floor(x * 2**n)`` or ``ceil(x * 2**n)`` (scaled back).
Everything numeric in the package is built on :class:`Dyadic`; floats never
enter a verified code path.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Union

__all__ = [
    "Dyadic",
    "DyadicInterval",
    "RealName",
    "PrecisionError",
    "ContractViolation",
    "ModulusVerdict",
    "exp_enclosure",
    "name_of",
    "cell_points",
    "check_modulus",
    "bit_reversal_points",
    "MAX_PRECISION_BITS",
]

MAX_PRECISION_BITS = 1 << 16

Number = Union[int, Fraction, "Dyadic"]


class PrecisionError(ArithmeticError):
    """Working precision hit the configured cap before the target width."""

    def __init__(self, message: str, achieved_width: Optional["Dyadic"] = None):
        super().__init__(message)
        self.achieved_width = achieved_width


class ContractViolation(ValueError):
    """A name/oracle returned something that is not a valid approximation."""


_DYADIC_RE = re.compile(r"^([+-]?)(\d+)p([+-]?\d+)$")


class Dyadic:
    """The exact value ``mantissa * 2**exponent``, kept with an odd mantissa."""

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: int = 0, exponent: int = 0):
        mantissa = int(mantissa)
        exponent = int(exponent)
        if mantissa == 0:
            exponent = 0
        else:
            tz = (mantissa & -mantissa).bit_length() - 1
            if tz:
                mantissa >>= tz
                exponent += tz
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    # construction -----------------------------------------------------

    @classmethod
    def of(cls, value: Number) -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, Fraction):
            den = value.denominator
            if den & (den - 1):
                raise ValueError(f"{value} is not a dyadic rational")
            return cls(value.numerator, -(den.bit_length() - 1))
        raise TypeError(f"cannot convert {type(value).__name__} to Dyadic")

    @classmethod
    def pow2(cls, k: int) -> "Dyadic":
        return cls(1, k)

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        m = _DYADIC_RE.match(text.strip())
        if not m:
            raise ValueError(f"bad dyadic literal {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        return cls(sign * int(m.group(2)), int(m.group(3)))

    def __str__(self) -> str:
        return f"{self.mantissa}p{self.exponent}"

    def __repr__(self) -> str:
        return f"Dyadic({self.mantissa}, {self.exponent})"

    # conversion -------------------------------------------------------

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def __float__(self) -> float:
        # plotting convenience only
        return float(self.to_fraction())

    def scaled_floor(self, n: int) -> int:
        """``floor(self * 2**n)``."""
        s = self.exponent + n
        return self.mantissa << s if s >= 0 else self.mantissa >> -s

    def scaled_ceil(self, n: int) -> int:
        return -((-self).scaled_floor(n))

    def is_multiple_of(self, n: int) -> bool:
        """True when ``self * 2**n`` is an integer."""
        return self.mantissa == 0 or self.exponent + n >= 0

    def floor_to(self, n: int) -> "Dyadic":
        return Dyadic(self.scaled_floor(n), -n)

    def ceil_to(self, n: int) -> "Dyadic":
        return Dyadic(self.scaled_ceil(n), -n)

    def round_to(self, n: int) -> "Dyadic":
        """Nearest multiple of ``2**-n``; ties go toward +infinity."""
        return Dyadic((self + Dyadic(1, -n - 1)).scaled_floor(n), -n)

    def bit_length(self) -> int:
        """Smallest ``e`` with ``|self| < 2**e`` (``-inf`` stand-in for zero)."""
        if self.mantissa == 0:
            return -(1 << 62)
        return abs(self.mantissa).bit_length() + self.exponent

    # arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Dyadic):
            if isinstance(other, int):
                other = Dyadic(other)
            else:
                return NotImplemented
        if self.mantissa == 0:
            return other
        if other.mantissa == 0:
            return self
        e1, e2 = self.exponent, other.exponent
        if e1 <= e2:
            return Dyadic(self.mantissa + (other.mantissa << (e2 - e1)), e1)
        return Dyadic((self.mantissa << (e1 - e2)) + other.mantissa, e2)

    __radd__ = __add__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.mantissa, self.exponent)

    def __pos__(self) -> "Dyadic":
        return self

    def __abs__(self) -> "Dyadic":
        return self if self.mantissa >= 0 else -self

    def __sub__(self, other):
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if isinstance(other, int):
            return Dyadic(other) - self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            return Dyadic(self.mantissa * other, self.exponent)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def shift(self, k: int) -> "Dyadic":
        """Multiply by ``2**k`` exactly."""
        return Dyadic(self.mantissa, self.exponent + k) if self.mantissa else self

    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    # comparison -------------------------------------------------------

    def _cmp(self, other) -> int:
        if isinstance(other, int):
            other = Dyadic(other)
        elif isinstance(other, Fraction):
            a = self.to_fraction()
            return (a > other) - (a < other)
        elif not isinstance(other, Dyadic):
            raise TypeError
        return (self - other).sign()

    def __eq__(self, other) -> bool:
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.exponent == other.exponent
        if isinstance(other, (int, Fraction)):
            return self._cmp(other) == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self) -> bool:
        return self.mantissa != 0


ZERO = Dyadic(0)
ONE = Dyadic(1)


def _frac_floor(q: Fraction, n: int) -> Dyadic:
    return Dyadic((q.numerator << n) // q.denominator if n >= 0
                  else q.numerator // (q.denominator << -n), -n)


def _frac_ceil(q: Fraction, n: int) -> Dyadic:
    return -_frac_floor(-q, n)


@dataclass(frozen=True)
class DyadicInterval:
    """Closed interval ``[lo, hi]`` with dyadic endpoints."""

    lo: Dyadic
    hi: Dyadic

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Number) -> "DyadicInterval":
        x = Dyadic.of(x)
        return cls(x, x)

    @classmethod
    def from_fraction(cls, q: Fraction, n: int) -> "DyadicInterval":
        """Tightest enclosure of ``q`` with endpoints on the ``2**-n`` grid."""
        q = Fraction(q)
        return cls(_frac_floor(q, n), _frac_ceil(q, n))

    @property
    def width(self) -> Dyadic:
        return self.hi - self.lo

    @property
    def mid(self) -> Dyadic:
        return (self.lo + self.hi).shift(-1)

    def contains(self, x: Number) -> bool:
        if isinstance(x, Fraction):
            return self.lo.to_fraction() <= x <= self.hi.to_fraction()
        return self.lo <= x <= self.hi

    def magnitude(self) -> Dyadic:
        return max(abs(self.lo), abs(self.hi))

    def hull(self, other: "DyadicInterval") -> "DyadicInterval":
        return DyadicInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def round_out(self, n: int) -> "DyadicInterval":
        return DyadicInterval(self.lo.floor_to(n), self.hi.ceil_to(n))

    def __add__(self, other):
        if not isinstance(other, DyadicInterval):
            other = DyadicInterval.point(other)
        return DyadicInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return DyadicInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        if not isinstance(other, DyadicInterval):
            other = DyadicInterval.point(other)
        return DyadicInterval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return DyadicInterval.point(other) - self

    def __mul__(self, other):
        if not isinstance(other, DyadicInterval):
            other = Dyadic.of(other)
            a, b = self.lo * other, self.hi * other
            return DyadicInterval(min(a, b), max(a, b))
        products = (self.lo * other.lo, self.lo * other.hi,
                    self.hi * other.lo, self.hi * other.hi)
        return DyadicInterval(min(products), max(products))

    __rmul__ = __mul__

    def shift(self, k: int) -> "DyadicInterval":
        return DyadicInterval(self.lo.shift(k), self.hi.shift(k))

    def __pow__(self, k: int) -> "DyadicInterval":
        if k < 0:
            raise ValueError("negative power")
        if k == 0:
            return DyadicInterval(ONE, ONE)
        a = _dpow(self.lo, k)
        b = _dpow(self.hi, k)
        if k % 2 == 0 and self.lo.sign() < 0 < self.hi.sign():
            return DyadicInterval(ZERO, max(a, b))
        return DyadicInterval(min(a, b), max(a, b))

    def reciprocal(self, n: int) -> "DyadicInterval":
        """Enclosure of ``1/x`` rounded outward to the ``2**-n`` grid."""
        if self.lo.sign() <= 0 <= self.hi.sign():
            raise ZeroDivisionError("interval contains zero")
        a = Fraction(1) / self.hi.to_fraction()
        b = Fraction(1) / self.lo.to_fraction()
        return DyadicInterval(_frac_floor(a, n), _frac_ceil(b, n))

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def _dpow(x: Dyadic, k: int) -> Dyadic:
    return Dyadic(x.mantissa ** k, x.exponent * k)


# -------------------------------------------------------------------- exp


def _exp_nonpositive(a: Dyadic, n: int) -> DyadicInterval:
    """Enclosure of ``exp(a)`` for ``a <= 0`` with width at most ``2**-n``."""
    if a.mantissa == 0:
        return DyadicInterval(ONE, ONE)
    n = max(n, 1)
    # exp(-0.7 m) < 2**-m since 0.7 > ln 2
    if a * 10 <= Dyadic(-7 * (n + 1)):
        return DyadicInterval(ZERO, Dyadic(1, -(n + 1)))
    # argument reduction to |r| <= 1/2
    k = max(0, a.bit_length() + 1)
    guard = 2 * k.bit_length() + 16
    wp = n + k + guard
    scale = 1 << wp
    r_fixed = a.shift(-k).scaled_floor(wp)
    # Taylor series in fixed point; each floor costs at most one ulp
    total = scale
    term = scale
    j = 1
    err = 2  # ulps: rounding of r and the tail below one ulp
    while term != 0:
        term = (term * r_fixed) // (j * scale)
        total += term
        err += 2
        j += 1
    lo = total - err
    hi = total + err
    if lo < 0:
        lo = 0
    for _ in range(k):
        lo = (lo * lo) >> wp
        hi = -((-(hi * hi)) >> wp)
    if hi > scale:
        hi = scale
    out = DyadicInterval(Dyadic(lo, -wp), Dyadic(hi, -wp))
    return out.round_out(n + 1)


def _exp_point(a: Dyadic, n: int) -> DyadicInterval:
    if a.sign() <= 0:
        return _exp_nonpositive(a, n)
    grow = 3 * (a.scaled_ceil(0) + 1)
    inv = _exp_nonpositive(-a, n + grow + 4)
    return inv.reciprocal(n + 1)


def exp_enclosure(x: DyadicInterval, n: int) -> DyadicInterval:
    """Enclosure of ``{exp(t) : t in x}``.

    Each endpoint is resolved to within ``2**-n``, so a point interval yields
    width at most ``2**-n``.
    """
    if not isinstance(x, DyadicInterval):
        x = DyadicInterval.point(x)
    if x.lo == x.hi:
        return _exp_point(x.lo, n)
    return DyadicInterval(_exp_point(x.lo, n).lo, _exp_point(x.hi, n).hi)


# ------------------------------------------------------------------ names


class RealName:
    """Precision-indexed approximations of a real number.

    ``query(n)`` returns a multiple of ``2**-n`` within ``2**-n`` of the value.
    ``query`` must be pure; wrapped callables are trusted only as far as
    :meth:`checked` verifies them.
    """

    __slots__ = ("_query", "label")

    def __init__(self, query: Callable[[int], Dyadic], label: str = ""):
        self._query = query
        self.label = label

    def query(self, n: int) -> Dyadic:
        return self._query(n)

    __call__ = query

    def checked(self, n: int) -> Dyadic:
        """``query(n)`` after enforcing the grid part of the name contract."""
        a = self._query(n)
        if not isinstance(a, Dyadic):
            raise ContractViolation(f"name returned non-dyadic {a!r} at n={n}")
        if not a.is_multiple_of(n):
            raise ContractViolation(f"name returned {a}, not a multiple of 2^-{n}")
        return a

    def __repr__(self) -> str:
        return f"RealName({self.label or '?'})"


def _choose_grid_point(enc: DyadicInterval, n: int) -> Dyadic:
    # enc has width < 2**-n, so it holds at most one grid point; that point,
    # or floor(lo) when there is none, is floor or ceil of the true value.
    k = enc.hi.scaled_floor(n)
    g = Dyadic(k, -n)
    if g >= enc.lo:
        return g
    return enc.lo.floor_to(n)


def name_of(x, max_bits: int = MAX_PRECISION_BITS, label: str = "") -> RealName:
    """Build a name for ``x``.

    ``x`` is an exact number (int, dyadic, Fraction) or an evaluator
    ``prec -> DyadicInterval`` whose enclosures shrink as ``prec`` grows.
    """
    if isinstance(x, (int, Dyadic, Fraction)):
        q = Fraction(x) if not isinstance(x, Dyadic) else x.to_fraction()
        return RealName(lambda n: _frac_floor(q, n), label or str(x))

    evaluate = x

    def query(n: int) -> Dyadic:
        target = Dyadic(1, -n)
        prec = n + 4
        last = None
        while prec <= max_bits:
            enc = evaluate(prec)
            last = enc.width
            if enc.width < target:
                return _choose_grid_point(enc, n)
            prec *= 2
        raise PrecisionError(
            f"could not resolve {label or 'value'} to 2^-{n} within {max_bits} bits",
            achieved_width=last,
        )

    return RealName(query, label)


# -------------------------------------------------------------- sampling


def bit_reversal_points(count: int, bits: int, offset: int = 0) -> Iterator[Dyadic]:
    """Low-discrepancy points ``k / 2**bits`` in ``[0, 1)`` by bit reversal."""
    size = 1 << bits
    for i in range(count):
        j = (i + offset) % size
        rev = int(format(j, f"0{bits}b")[::-1], 2) if bits else 0
        yield Dyadic(rev, -bits)


def cell_points(count: int, cell_bits: int, sub_bits: int = 8,
                offset: int = 0) -> Iterator[Dyadic]:
    """Points ``(T + theta) 2**-cell_bits`` off the grid.

    ``T`` runs through the cells in bit-reversed order; ``theta`` is an odd
    multiple of ``2**-sub_bits`` taken from a second, scrambled index, so no
    point lands on a cell boundary.
    """
    half = 1 << (sub_bits - 1)
    for i, cell in enumerate(bit_reversal_points(count, cell_bits, offset)):
        k = ((i + offset) * 0x9E3779B1 >> 7) % half
        yield cell + Dyadic(2 * k + 1, -(cell_bits + sub_bits))


# -------------------------------------------------------------- modulus


@dataclass
class ModulusVerdict:
    ok: bool
    checked: int
    witness: Optional[dict] = None


def check_modulus(
    fname: Callable[[Dyadic], RealName],
    p: Callable[[int], int],
    precisions=(4, 8, 12),
    samples: int = 32,
    offset: int = 0,
) -> ModulusVerdict:
    """Spot-check ``|x-y| <= 2**-p(n)  =>  |f(x)-f(y)| <= 2**-n`` on ``[0, 1]``.

    Output distances are measured on queries at precision ``n + 2``, so the
    allowed gap carries a slack of ``2 * 2**-(n+2)``.
    """
    checked = 0
    for n in precisions:
        gap = Dyadic(1, -p(n))
        allowed = Dyadic(1, -n) + Dyadic(1, -(n + 1))
        for x in bit_reversal_points(samples, 10, offset):
            y = x + gap
            if y > ONE:
                y = x - gap
            fx = fname(x).query(n + 2)
            fy = fname(y).query(n + 2)
            checked += 1
            if abs(fx - fy) > allowed:
                return ModulusVerdict(False, checked, {
                    "n": n, "x": str(x), "y": str(y),
                    "fx": str(fx), "fy": str(fy),
                })
    return ModulusVerdict(True, checked)
