"""Encoding a tally language into one real number.

Bit ``n`` of the tally set ``T`` is stored as the term
``T(0^n) / 2**E_n`` with ``E_n = 2n + gamma(n) + rho_bar(n+1)``, where
``rho_bar(n)`` sums the final-value exponents of the gadgets for
``F(0^0), ..., F(0^(n-1))``.  The exponents grow strictly, leaving at least
two zero bits between consecutive terms, so each bit can be read back from a
single query.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Tuple

from ..bump import DEFAULT_MAX_ORDER
from ..exactreal import RealName, name_of, Dyadic
from ..formula import CountingInstance, parse_instance
from .family import gadget_for
from .params import Polynomial, capped_s

__all__ = ["FinalValueParams", "final_value_name", "decode_tally", "tally_instance",
           "DEFAULT_HORIZON", "HorizonError"]

DEFAULT_HORIZON = 8

Tally = Callable[[int], bool]
Reduction = Callable[[int, bool], CountingInstance]


class HorizonError(IndexError):
    pass


def tally_instance(n: int, member: bool) -> CountingInstance:
    """``F(0^n)``: one variable ``a``, satisfied by exactly one assignment.

    Threshold 1 makes the instance true and threshold 2 false; both have the
    same length, so the exponents do not depend on the language.
    """
    return parse_instance(f"blocks 1\nblock 1 vars a threshold {1 if member else 2}\nformula a\n")


def _lam(x: int) -> int:
    return x + 1


def _gamma(x: int) -> int:
    # mu(x, x) + x lambda(x) with q(y) = y standing in for the width exponent
    return (x + 1) * x + capped_s(min(x + 1, DEFAULT_MAX_ORDER)) + x * _lam(x)


@dataclass(frozen=True)
class FinalValueParams:
    k: int
    horizon: int
    rhos: Tuple[int, ...]      # rho(|F(0^i)|) for i < horizon

    @classmethod
    def build(cls, k: int = 1, horizon: int = DEFAULT_HORIZON,
              reduction: Reduction = tally_instance) -> "FinalValueParams":
        rhos = []
        for i in range(horizon):
            # the gadget size must not depend on membership; use the true branch
            inst = reduction(i, True)
            if reduction(i, False).padded_length != inst.padded_length:
                raise ValueError(f"reduction changes length at index {i}")
            rhos.append(gadget_for(inst, k).params.rho)
        return cls(k, horizon, tuple(rhos))

    def lam(self, x: int) -> int:
        return _lam(x)

    def gamma(self, x: int) -> int:
        return _gamma(x)

    def rho_bar(self, n: int) -> int:
        return sum(self.rhos[:n])

    def exponent(self, n: int) -> int:
        if not 0 <= n < self.horizon:
            raise HorizonError(f"index {n} beyond horizon {self.horizon}")
        return 2 * n + self.gamma(n) + self.rho_bar(n + 1)

    def exponents(self) -> List[int]:
        return [self.exponent(n) for n in range(self.horizon)]


def series_value(tally: Tally, params: FinalValueParams) -> Dyadic:
    acc = Dyadic(0)
    for n in range(params.horizon):
        if tally(n):
            acc = acc + Dyadic(1, -params.exponent(n))
    return acc


def final_value_name(tally: Tally, params: FinalValueParams = None,
                     reduction: Reduction = tally_instance, k: int = 1) -> RealName:
    """Name of ``sum_n T(0^n) / 2**E_n`` over the horizon.

    Each ``T(0^n)`` is taken as the truth value of ``reduction(n, tally(n))``
    so the number is built through the counting instances, not the tally bits.
    """
    from ..formula import truth_value

    if params is None:
        params = FinalValueParams.build(k, reduction=reduction)
    bits = [truth_value(reduction(n, bool(tally(n)))) for n in range(params.horizon)]
    value = series_value(lambda n: bits[n], params)
    return name_of(value, label="tally-final-value")


def decode_tally(name: RealName, n: int, params: FinalValueParams) -> int:
    """``T(0^n)`` read from a name of the encoded number."""
    e = params.exponent(n)
    v = name.checked(e + 2)
    # floor(a * 2**E_n + 1/4) mod 2; queries are within 2**-(E_n+2) of a
    return (v + Dyadic(1, -e - 2)).scaled_floor(e) & 1
