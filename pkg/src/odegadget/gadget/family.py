"""Per-instance smooth functions ``g_u`` and ``h_u``.

``h_u`` stores row ``i`` of the grid solution in base-``B`` digit ``d_u(i)``
and moves the active digit along the bump ``f`` inside each column, so that
``h_u' = g_u(t, h_u)``.  All values are dyadic; evaluation precisions are
absolute (``|result - exact| <= 2**-n``), and every smooth factor is computed
only to the bits that survive its power-of-two scale.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from ..bump import BUMP, DEFAULT_MAX_ORDER
from ..diffeq import (BitLayout, NormalizedGadget, SolutionGrid, build_gadget,
                      normalize, solve)
from ..exactreal import ONE, ZERO, Dyadic
from ..formula import CountingInstance, truth_value
from .params import GadgetParams, Polynomial, capped_s, make_params

__all__ = ["Decomposition", "Gadget", "gadget_for", "clear_cache"]

QUARTER = Dyadic(1, -2)


@dataclass(frozen=True)
class Decomposition:
    """``t = (T + theta) 2**-q`` and ``y = (Y + eta) B**-d_u(j_u(T))``."""

    T: int
    theta: Dyadic
    Y: int
    eta: Dyadic
    j: int


def _scaled_df(m: int, x: Dyadic, e: int, n: int) -> Dyadic:
    """``D^m f(x) * 2**e`` within ``2**-n``."""
    prec = n + e
    if prec + capped_s(m) < 0:
        return ZERO
    return BUMP.df_eval(m, x, max(prec, 0)).shift(e)


def _df_product(m1: int, x1: Dyadic, m2: int, x2: Dyadic, e: int, n: int) -> Dyadic:
    """``D^m1 f(x1) * D^m2 f(x2) * 2**e`` within ``2**-n``."""
    s1, s2 = capped_s(m1), capped_s(m2)
    base = n + e + 2
    if base + s1 + s2 < 0:
        return ZERO
    a = BUMP.df_eval(m1, x1, max(base + s2 + 1, 0))
    b = BUMP.df_eval(m2, x2, max(base + s1 + 1, 0))
    return (a * b).shift(e).round_to(n + 2)


class Gadget:
    """The pair ``(g_u, h_u)`` built on a normalized difference equation."""

    def __init__(self, ng: NormalizedGadget, params: GadgetParams,
                 instance: Optional[CountingInstance] = None):
        self.ng = ng
        self.params = params
        self.instance = instance
        self.eq = ng.equation
        self._sol: Optional[SolutionGrid] = None
        self._lock = threading.Lock()
        # -1 flips g without touching h (fault injection)
        self.g_sign = 1

    @classmethod
    def from_instance(cls, inst: CountingInstance, k: int = 1,
                      gamma: Polynomial = Polynomial.identity(), mode: str = "faithful",
                      layout: BitLayout = BitLayout.PINNED) -> "Gadget":
        ng = normalize(build_gadget(inst, layout))
        value_bits = max(inst.block_sizes) + 1
        params = make_params(ng, k, gamma, mode=mode, value_bits=value_bits)
        return cls(ng, params, inst)

    # ---------------------------------------------------------- discrete

    @property
    def solution(self) -> SolutionGrid:
        with self._lock:
            if self._sol is None:
                self._sol = solve(self.eq)
            return self._sol

    @property
    def width(self) -> int:
        return self.eq.width

    def active_row(self, T: int) -> int:
        return self.ng.j_u(T) if T < self.width else 0

    def G(self, T: int, Y: int) -> int:
        """``G_u(j_u(T), T, Y mod 2**r)``; zero at the right end."""
        if T >= self.width:
            return 0
        return self.eq.step(self.active_row(T), T, Y % (1 << self.params.r))

    def L(self) -> int:
        return self.solution(self.eq.height, self.width)

    def grid_value(self, T: int) -> Dyadic:
        """``sum_i H_u(i, T) / B**d_u(i)``, exact."""
        col = self.solution.columns[T]
        acc = ZERO
        for i, v in enumerate(col):
            if v:
                acc = acc + Dyadic(v, -self.params.digit_exp(i))
        return acc

    def final_value(self) -> Dyadic:
        """``2**-rho * L(u)``."""
        return Dyadic(self.L(), -self.params.rho)

    # -------------------------------------------------------- continuous

    def split_t(self, t: Dyadic) -> Tuple[int, Dyadic]:
        t = Dyadic.of(t)
        if t < 0 or t > 1:
            raise ValueError(f"t = {t} outside [0, 1]")
        scaled = t.shift(self.params.q)
        T = scaled.scaled_floor(0)
        return T, scaled - T

    def decompose(self, t: Dyadic, y: Dyadic) -> Decomposition:
        T, theta = self.split_t(t)
        j = self.active_row(T)
        z = Dyadic.of(y).shift(self.params.digit_exp(j))
        Y = (z + QUARTER).scaled_floor(0)
        return Decomposition(T, theta, Y, z - Y, j)

    def _dg_tilde_exp(self, i: int, j: int) -> int:
        """log2 of ``2**((i+1) q) / B**d_u(j+1)``."""
        return (i + 1) * self.params.q - self.params.digit_exp(j + 1)

    def g_tilde(self, Y: int, t: Dyadic, n: int, order: int = 0) -> Dyadic:
        """``D^order g~_{u,Y}(t)`` within ``2**-n``."""
        T, theta = self.split_t(t)
        return self._g_tilde(T, theta, Y, n, order)

    def _g_tilde(self, T: int, theta: Dyadic, Y: int, n: int, i: int) -> Dyadic:
        G = self.G(T, Y)
        if G == 0 or theta.mantissa == 0:
            return ZERO
        v = _scaled_df(i + 1, theta, self._dg_tilde_exp(i, self.active_row(T)), n)
        return v if G > 0 else -v

    def g_u(self, t: Dyadic, y: Dyadic, n: int) -> Dyadic:
        return self.deriv(0, 0, t, y, n)

    def deriv(self, i: int, j: int, t: Dyadic, y: Dyadic, n: int) -> Dyadic:
        """``D^(i,j) g_u(t, y)`` within ``2**-n``."""
        v = self._deriv(i, j, t, y, n)
        return v if self.g_sign > 0 else -v

    def _deriv(self, i: int, j: int, t: Dyadic, y: Dyadic, n: int) -> Dyadic:
        if i < 0 or j < 0 or i + 1 > DEFAULT_MAX_ORDER:
            raise ValueError(f"derivative order ({i}, {j}) outside the cap")
        if j > self.params.k:
            raise ValueError(f"j = {j} exceeds smoothness order k = {self.params.k}")
        dec = self.decompose(t, y)
        T, theta, Y, eta = dec.T, dec.theta, dec.Y, dec.eta
        blend = eta > QUARTER
        if j == 0:
            a = self._g_tilde(T, theta, Y, n + 3, i)
            if not blend:
                return a.round_to(n + 1)
            b = self._g_tilde(T, theta, Y + 1, n + 3, i)
            if a == b:
                return a.round_to(n + 1)
            v = (eta.shift(2) - 1).shift(-1)
            # |b - a| <= 2**(mu(i) + 1) / B**d_u(j+1)
            span = self.params.mu(i) + 1 - self.params.digit_exp(dec.j + 1)
            fv = BUMP.f_eval(v, max(n + 3 + span, 0))
            return (a + fv * (b - a)).round_to(n + 3)
        if not blend:
            return ZERO
        dG = self.G(T, Y + 1) - self.G(T, Y)
        if dG == 0 or theta.mantissa == 0:
            return ZERO
        v = (eta.shift(2) - 1).shift(-1)
        e = j * (1 + self.params.digit_exp(dec.j)) + self._dg_tilde_exp(i, dec.j)
        return _df_product(j, v, i + 1, theta, e, n + 1) * dG  # |dG| <= 2

    def h_u(self, t: Dyadic, n: int) -> Dyadic:
        """``h_u(t)`` within ``2**-n``; exact on the grid."""
        T, theta = self.split_t(t)
        base = self.grid_value(T)
        if theta.mantissa == 0:
            return base
        j = self.active_row(T)
        G = self.G(T, self.solution(j, T))
        if G == 0:
            return base
        v = _scaled_df(0, theta, -self.params.digit_exp(j + 1), n + 1)
        return base + (v if G > 0 else -v)

    def bound_exp(self, i: int) -> int:
        """``mu(i, |u|) - gamma(|u|)``: the derivative bound exponent."""
        return self.params.mu(i) - self.params.gamma(self.params.size)

    def cell_scale_exp(self, T: int) -> int:
        """``log2 B**d_u(j_u(T)+1)``: the digit moved in column ``T``."""
        return self.params.digit_exp(self.active_row(T) + 1)


_CACHE: Dict[Tuple, Gadget] = {}
_CACHE_LOCK = threading.Lock()


def gadget_for(inst: CountingInstance, k: int = 1,
               gamma: Polynomial = Polynomial.identity(), mode: str = "faithful",
               layout: BitLayout = BitLayout.PINNED) -> Gadget:
    """Memoized :meth:`Gadget.from_instance`."""
    key = (inst.serialize(), k, gamma, mode, layout)
    with _CACHE_LOCK:
        hit = _CACHE.get(key)
    if hit is not None:
        return hit
    gad = Gadget.from_instance(inst, k, gamma, mode, layout)
    with _CACHE_LOCK:
        return _CACHE.setdefault(key, gad)


def clear_cache() -> None:
    with _CACHE_LOCK:
        _CACHE.clear()
