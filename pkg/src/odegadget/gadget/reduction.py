"""Recovering an instance's truth value from a name of the glued ``h``."""

from __future__ import annotations

from typing import Callable

from ..exactreal import (ContractViolation, Dyadic, DyadicInterval, RealName,
                         name_of)
from ..formula import CountingInstance
from .glue import GlueLayout, glue_h_eval

__all__ = ["reduce_instance", "glued_h_oracle", "HOracle"]

# maps a name of t in [0, 1] to a name of h(t)
HOracle = Callable[[RealName, int], RealName]

# h is exact on the centres, so deep queries stay cheap
ORACLE_MAX_BITS = 1 << 28


def glued_h_oracle(layout: GlueLayout) -> HOracle:
    """Name-level access to the glued ``h``.

    The argument name is queried at ``point_bits``; the oracle is exact for
    arguments that are multiples of ``2**-point_bits``, which is the case for
    every ``c_u``.
    """
    def oracle(t_name: RealName, point_bits: int) -> RealName:
        t = t_name.checked(point_bits)

        def enclose(prec: int) -> DyadicInterval:
            v = glue_h_eval(layout, t, prec + 1)
            slack = Dyadic(1, -(prec + 1))
            return DyadicInterval(v - slack, v + slack)

        return name_of(enclose, max_bits=ORACLE_MAX_BITS, label=f"h({t})")

    return oracle


def reduce_instance(inst: CountingInstance, oracle: HOracle, layout: GlueLayout) -> int:
    """Decide ``inst`` with one query to a name of ``h(c_u)``.

    ``h(c_u) = 2**-(rho + lambda) * L(u)``, so a query at precision
    ``rho + lambda + 2`` read against the midpoint ``2**-(rho + lambda + 1)``
    returns ``L(u)``.
    """
    slot = layout.slot_for(inst)
    rho_prime = slot.params.rho + slot.lam
    centre = name_of(slot.centre, label="c_u")
    point_bits = slot.lam + 1
    answer = oracle(centre, point_bits)
    n = rho_prime + 2
    v = answer.query(n)
    if not isinstance(v, Dyadic) or not v.is_multiple_of(n):
        raise ContractViolation(f"oracle answered {v} at precision {n}, not a multiple of 2^-{n}")
    return 1 if v >= Dyadic(1, -(rho_prime + 1)) else 0
