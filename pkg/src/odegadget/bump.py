"""The smooth step ``f(t) = A(t) / (A(t) + A(1-t))`` with ``A(t) = exp(-1/t)``.

``f`` is flat at both ends: ``f(0) = 0``, ``f(1) = 1`` and every derivative
vanishes there.  Writing ``w(t) = 1/(1-t) - 1/t`` gives ``f = 1/(1 + exp(-w))``,
so ``Df = f(1-f) w'`` and every derivative is a finite sum of monomials
``coef * f**a * t**-b * (1-t)**-c`` with ``a >= 1``.  Those sums are kept
symbolically and evaluated with interval arithmetic.

Only ``t`` in ``[0, 1/2]`` is ever evaluated directly; the rest follows from
``f(t) + f(1-t) = 1``, i.e. ``D^m f(t) = (-1)**(m+1) D^m f(1-t)`` for ``m >= 1``.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .exactreal import (MAX_PRECISION_BITS, ONE, ZERO, Dyadic, DyadicInterval,
                        PrecisionError, exp_enclosure)

__all__ = [
    "BumpFunction", "CertificationError", "BUMP",
    "f_eval", "df_eval", "certify_bound", "s_table", "SHIPPED_S",
]

DEFAULT_MAX_ORDER = 8
# output of certify_bound(m) for m = 0..8 at depth 12; re-checked by the tests
SHIPPED_S = (0, 2, 4, 7, 12, 17, 23, 30, 38)
HALF = Dyadic(1, -1)

Monomial = Tuple[int, int, int]  # (a, b, c)


class CertificationError(RuntimeError):
    def __init__(self, message: str, best_bound: Optional[int] = None):
        super().__init__(message)
        self.best_bound = best_bound


def _differentiate(poly: Dict[Monomial, int]) -> Dict[Monomial, int]:
    out: Dict[Monomial, int] = {}

    def add(key, v):
        if v:
            out[key] = out.get(key, 0) + v
            if out[key] == 0:
                del out[key]

    for (a, b, c), k in poly.items():
        # D f^a = a (f^a - f^{a+1}) (t^-2 + (1-t)^-2)
        add((a, b + 2, c), k * a)
        add((a, b, c + 2), k * a)
        add((a + 1, b + 2, c), -k * a)
        add((a + 1, b, c + 2), -k * a)
        if b:
            add((a, b + 1, c), -k * b)
        if c:
            add((a, b, c + 1), k * c)
    return out


class BumpFunction:
    """Symbolic derivative table plus certified bounds ``|D^m f| <= 2**s(m)``."""

    def __init__(self, max_order: int = DEFAULT_MAX_ORDER, depth: int = 12):
        self.max_order = max_order
        self.depth = depth
        polys: List[Dict[Monomial, int]] = [{(1, 0, 0): 1}]
        # one extra order: cell bounds use D^{m+1} as a Lipschitz constant
        for _ in range(max_order + 1):
            polys.append(_differentiate(polys[-1]))
        self.polys = [sorted(p.items()) for p in polys]
        self._s: Dict[int, int] = {0: 0}
        self._lock = threading.Lock()

    # ----------------------------------------------------------- points

    def _check_order(self, m: int) -> None:
        if not 0 <= m <= self.max_order:
            raise ValueError(f"derivative order {m} outside 0..{self.max_order}")

    @staticmethod
    def _f_interval(t: Fraction, wp: int) -> DyadicInterval:
        """Enclosure of ``f(t)`` for ``0 < t <= 1/2``."""
        w = (2 * t - 1) / (t * (1 - t))
        W = DyadicInterval.from_fraction(w, wp)
        E = exp_enclosure(W, wp)  # exp(w) <= 1 here
        lo = E.lo.to_fraction()
        hi = E.hi.to_fraction()
        return DyadicInterval.from_fraction(lo / (1 + lo), wp).hull(
            DyadicInterval.from_fraction(hi / (1 + hi), wp))

    def _tiny_bound_exp(self, m: int, t: Dyadic) -> Optional[int]:
        """log2 upper bound of ``|D^m f(t)|`` for very small ``t``, else None."""
        E = -t.bit_length()  # 2**-(E+1) <= t < 2**-E
        if E < 8:
            return None
        # f <= exp(w) <= exp(2 - 2**E) <= 2**-(2**E - 2)
        decay = (1 << E) - 2
        worst = None
        for (a, b, c), k in self.polys[m]:
            e = abs(k).bit_length() - a * decay + (E + 1) * b + c
            worst = e if worst is None else max(worst, e)
        return worst + len(self.polys[m]).bit_length()

    def _sum_interval(self, m: int, F: DyadicInterval, inv_t: DyadicInterval,
                      inv_1mt: DyadicInterval, wp: int) -> DyadicInterval:
        total = DyadicInterval(ZERO, ZERO)
        fpow = {}
        tpow = {}
        upow = {}
        for (a, b, c), k in self.polys[m]:
            if a not in fpow:
                fpow[a] = (F ** a).round_out(wp)
            if b not in tpow:
                tpow[b] = (inv_t ** b).round_out(wp)
            if c not in upow:
                upow[c] = (inv_1mt ** c).round_out(wp)
            term = (fpow[a] * tpow[b]).round_out(wp) * upow[c]
            total = total + (term * k).round_out(wp)
        return total

    def _enclose_point(self, m: int, t: Dyadic, wp: int) -> DyadicInterval:
        tq = t.to_fraction()
        F = self._f_interval(tq, wp)
        if m == 0:
            return F
        inv_t = DyadicInterval.from_fraction(1 / tq, wp)
        inv_1mt = DyadicInterval.from_fraction(1 / (1 - tq), wp)
        return self._sum_interval(m, F, inv_t, inv_1mt, wp)

    def _eval_left(self, m: int, t: Dyadic, n: int) -> Dyadic:
        """``D^m f(t)`` within ``2**-n`` for ``0 <= t <= 1/2``."""
        if t.mantissa == 0:
            return ZERO
        if m == 0 and t == HALF:
            return HALF
        tiny = self._tiny_bound_exp(m, t)
        if tiny is not None and tiny < -n - 1:
            return ZERO
        target = Dyadic(1, -(n + 1))
        wp = max(n, 0) + 40
        while wp <= MAX_PRECISION_BITS:
            enc = self._enclose_point(m, t, wp)
            if enc.width <= target:
                return enc.mid.round_to(n + 2)
            wp *= 2
        raise PrecisionError(f"D^{m} f({t}) not resolved to 2^-{n}", enc.width)

    def f_eval(self, t: Dyadic, n: int) -> Dyadic:
        """``f(t)`` within ``2**-n``; exact at 0, 1/2 and 1."""
        t = Dyadic.of(t)
        if t < 0 or t > 1:
            raise ValueError(f"t = {t} outside [0, 1]")
        if t == ONE:
            return ONE
        if t > HALF:
            return ONE - self._eval_left(0, ONE - t, n)
        return self._eval_left(0, t, n)

    def df_eval(self, m: int, t: Dyadic, n: int) -> Dyadic:
        """``D^m f(t)`` within ``2**-n``; exactly 0 at ``t`` in {0, 1} for ``m >= 1``."""
        self._check_order(m)
        if m == 0:
            return self.f_eval(t, n)
        t = Dyadic.of(t)
        if t < 0 or t > 1:
            raise ValueError(f"t = {t} outside [0, 1]")
        if t.mantissa == 0 or t == ONE:
            return ZERO
        if t > HALF:
            v = self._eval_left(m, ONE - t, n)
            return v if m % 2 else -v
        return self._eval_left(m, t, n)

    # ------------------------------------------------------------ cells

    def _naive_bound(self, m: int, q0: Fraction, q1: Fraction, wp: int) -> Dyadic:
        F = self._f_interval(q0, wp).hull(self._f_interval(q1, wp))
        if m == 0:
            return F.magnitude()
        inv_t = DyadicInterval.from_fraction(1 / q1, wp).hull(
            DyadicInterval.from_fraction(1 / q0, wp))
        inv_1mt = DyadicInterval.from_fraction(1 / (1 - q0), wp).hull(
            DyadicInterval.from_fraction(1 / (1 - q1), wp))
        return self._sum_interval(m, F, inv_t, inv_1mt, wp).magnitude()

    def cell_bound(self, m: int, t0: Dyadic, t1: Dyadic, wp: int = 64) -> Optional[Dyadic]:
        """Upper bound of ``|D^m f|`` on ``[t0, t1]`` inside ``[0, 1/2]``.

        Returns None when the cell is too wide for the bound to apply.
        """
        if t0.mantissa == 0:
            # each monomial f^a t^-b (1-t)^-c increases on (0, a/(2b)), so the
            # value at t1 dominates the cell; a >= 1 and b <= 2m
            if m and t1.to_fraction() * 4 * m > 1:
                return None
            bound = ZERO
            F = self._f_interval(t1.to_fraction(), wp)
            inv_t = DyadicInterval.from_fraction(1 / t1.to_fraction(), wp)
            inv_1mt = DyadicInterval.from_fraction(1 / (1 - t1.to_fraction()), wp)
            for (a, b, c), k in self.polys[m] if m else [((1, 0, 0), 1)]:
                term = (F ** a).round_out(wp) * (inv_t ** b).round_out(wp)
                term = term.round_out(wp) * (inv_1mt ** c).round_out(wp)
                bound = bound + term.hi.ceil_to(wp) * abs(k)
            return bound
        # centered form: |D^m f(t)| <= |D^m f(mid)| + r sup |D^{m+1} f|
        mid = (t0 + t1).shift(-1)
        r = (t1 - t0).shift(-1)
        centre = self._enclose_point(m, mid, wp).magnitude()
        slope = self._naive_bound(m + 1, t0.to_fraction(), t1.to_fraction(), wp)
        return centre + (slope * r).ceil_to(wp)

    def _certify_target(self, m: int, target: Dyadic) -> bool:
        stack = [(ZERO, HALF, 0)]
        while stack:
            t0, t1, depth = stack.pop()
            bound = self.cell_bound(m, t0, t1)
            if bound is not None and bound <= target:
                continue
            if depth >= self.depth:
                return False
            mid = (t0 + t1).shift(-1)
            stack.append((mid, t1, depth + 1))
            stack.append((t0, mid, depth + 1))
        return True

    def sample_max(self, m: int, points: int = 256, n: int = 24) -> Dyadic:
        """Largest ``|D^m f|`` seen on an even grid of ``[0, 1/2]`` (not a bound)."""
        if points < 1 or points & (points - 1):
            raise ValueError("points must be a power of two")
        shift = points.bit_length()  # t = k / (2 * points)
        best = ZERO
        for k in range(points + 1):
            best = max(best, abs(self.df_eval(m, Dyadic(k, -shift), n)))
        return best

    def certify_bound(self, m: int) -> int:
        """Smallest tried ``s`` with ``|D^m f| <= 2**s`` proven by branch and bound.

        The returned table is made nondecreasing in ``m``.
        """
        self._check_order(m)
        with self._lock:
            if m in self._s:
                return self._s[m]
        prev = self.certify_bound(m - 1) if m > 1 else 0
        seen = self.sample_max(m, 64)
        s = max(0, seen.bit_length() - (1 if abs(seen.mantissa) == 1 else 0))
        for _ in range(6):
            if self._certify_target(m, Dyadic(1, s)):
                break
            s += 1
        else:
            raise CertificationError(f"no bound for |D^{m} f| certified at depth {self.depth}",
                                     best_bound=s)
        s = max(s, prev)
        with self._lock:
            self._s[m] = s
        return s

    def s(self, m: int) -> int:
        """Shipped bound exponent; falls back to certifying past the table."""
        self._check_order(m)
        if m < len(SHIPPED_S):
            return SHIPPED_S[m]
        return self.certify_bound(m)


BUMP = BumpFunction()


def f_eval(t: Dyadic, n: int) -> Dyadic:
    return BUMP.f_eval(t, n)


def df_eval(m: int, t: Dyadic, n: int) -> Dyadic:
    return BUMP.df_eval(m, t, n)


def certify_bound(m: int) -> int:
    return BUMP.certify_bound(m)


def s_table(max_order: int = DEFAULT_MAX_ORDER) -> List[int]:
    return [BUMP.s(m) for m in range(max_order + 1)]
