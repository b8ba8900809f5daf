"""Gluing per-instance gadgets into one pair ``(g, h)`` on ``[0, 1]``.

Instance ``u`` owns the interval ``[l_u^-, l_u^+]`` of length ``2/Lambda_u``
with midpoint ``c_u``.  A scaled copy of ``h_u`` runs forward on
``[l_u^-, c_u]`` and a mirrored copy runs back on ``[c_u, l_u^+]``, so ``h``
vanishes at both ends and equals ``h_u(1)/Lambda_u`` at ``c_u``.  Outside
every owned interval ``g`` and ``h`` are 0.
"""

from __future__ import annotations

import bisect
import hashlib
from dataclasses import dataclass
from math import factorial
from typing import Iterable, List, Optional, Sequence, Tuple

from ..bump import DEFAULT_MAX_ORDER
from ..exactreal import ONE, ZERO, Dyadic
from ..formula import CountingInstance
from .family import Gadget, gadget_for
from .params import Polynomial, capped_s

__all__ = ["GlueSlot", "GlueLayout", "glue_gamma", "code_of", "glue_g_eval",
           "glue_h_eval", "glue_deriv_eval", "LAMBDA"]

LAMBDA = Polynomial((2, 2))       # lambda(x) = 2x + 2


def glue_gamma(q: int) -> Polynomial:
    """``gamma(x) = mu(x, x) + x lambda(x)`` with ``q`` fixed and ``s`` capped.

    ``mu(x, y) = (x+1) q(y) + s(x+1)``; the gadget width exponent ``q`` is a
    number here, and ``s(x+1)`` is frozen at the largest tabulated order.
    """
    return Polynomial((q + capped_s(DEFAULT_MAX_ORDER), q)) + Polynomial.identity() * LAMBDA


def code_of(inst: CountingInstance) -> int:
    """Stand-in for the binary value of ``u``: a digest of its serialization mod ``2**|u|``."""
    digest = hashlib.sha256(inst.serialize().encode("utf-8")).digest()
    return int.from_bytes(digest, "big") % (1 << inst.padded_length)


@dataclass(frozen=True)
class GlueSlot:
    gadget: Gadget
    size: int          # |u|
    lam: int           # lambda(|u|)
    code: int          # u-bar
    lo: Dyadic
    centre: Dyadic
    hi: Dyadic

    @property
    def params(self):
        return self.gadget.params


class GlueLayout:
    """Interval layout and gadgets for a finite corpus."""

    def __init__(self, slots: Sequence[GlueSlot]):
        self.slots: List[GlueSlot] = sorted(slots, key=lambda s: s.lo)
        for a, b in zip(self.slots, self.slots[1:]):
            if not a.hi < b.lo:
                raise ValueError(f"glue intervals overlap: [{a.lo}, {a.hi}] and [{b.lo}, {b.hi}]")
        if self.slots and not self.slots[-1].hi < ONE:
            raise ValueError("glue interval reaches 1")
        self._starts = [s.lo for s in self.slots]

    @classmethod
    def build(cls, instances: Iterable[CountingInstance], k: int = 1,
              mode: str = "faithful", ks: Optional[Sequence[int]] = None) -> "GlueLayout":
        """Lay out ``instances``; ``ks`` optionally gives a smoothness order per instance."""
        instances = list(instances)
        ks = [k] * len(instances) if ks is None else list(ks)
        slots = []
        seen = {}
        for inst, k in zip(instances, ks):
            key = inst.serialize()
            if key in seen:
                continue
            probe = gadget_for(inst, k)          # width exponent does not depend on gamma
            gad = gadget_for(inst, k, glue_gamma(probe.params.q), mode)
            size = inst.padded_length
            lam = LAMBDA(size)
            code = code_of(inst)
            centre = ONE - Dyadic(1, -size) + Dyadic(2 * code + 1, -lam)
            half = Dyadic(1, -lam)
            slots.append(GlueSlot(gad, size, lam, code, centre - half, centre, centre + half))
            seen[key] = True
        return cls(slots)

    def slot_for(self, inst: CountingInstance) -> GlueSlot:
        key = inst.serialize()
        for s in self.slots:
            if s.gadget.instance is not None and s.gadget.instance.serialize() == key:
                return s
        raise KeyError("instance not in the glue corpus")

    def locate(self, t: Dyadic) -> Optional[Tuple[GlueSlot, Dyadic, int]]:
        """``(slot, local t, side)`` with side +1 on the forward half, -1 on the mirror."""
        t = Dyadic.of(t)
        if t < 0 or t > 1:
            raise ValueError(f"t = {t} outside [0, 1]")
        idx = bisect.bisect_right(self._starts, t) - 1
        if idx < 0:
            return None
        slot = self.slots[idx]
        if t > slot.hi:
            return None
        if t <= slot.centre:
            return slot, (t - slot.lo).shift(slot.lam), 1
        return slot, (slot.hi - t).shift(slot.lam), -1


def _taylor(gad: Gadget, i: int, j: int, t: Dyadic, anchor: int, z: Dyadic,
            n: int) -> Dyadic:
    """``sum_{l=j..k} D^(i,l) g_u(t, anchor) / (l-j)! * (z - anchor)**(l-j)`` within ``2**-n``."""
    k = gad.params.k
    dz = z - anchor
    mag = max(dz.bit_length(), 0)
    acc = ZERO
    for l in range(j, k + 1):
        power = l - j
        # term error must stay below 2**-(n+5) after multiplying by |dz|**power
        d = gad.deriv(i, l, t, Dyadic(anchor), n + 5 + mag * power)
        if d:
            term = d * _pow(dz, power)
            fac = factorial(power)
            acc = acc + _div_round(term, fac, n + 5)
    return acc.round_to(n + 2)


def _pow(x: Dyadic, k: int) -> Dyadic:
    out = ONE
    for _ in range(k):
        out = out * x
    return out


def _div_round(x: Dyadic, m: int, n: int) -> Dyadic:
    if m == 1:
        return x
    return Dyadic((x.to_fraction() * (1 << n) / m).__floor__(), -n)


def _local_deriv(gad: Gadget, i: int, j: int, t: Dyadic, z: Dyadic, n: int) -> Dyadic:
    if z > 1:
        return _taylor(gad, i, j, t, 1, z, n)
    if z < -1:
        return _taylor(gad, i, j, t, -1, z, n)
    return gad.deriv(i, j, t, z, n)


def glue_deriv_eval(layout: GlueLayout, i: int, j: int, t: Dyadic, y: Dyadic,
                    n: int) -> Dyadic:
    """``D_1^i D_2^j g(t, y)`` within ``2**-n``."""
    y = Dyadic.of(y)
    if y < -1 or y > 1:
        raise ValueError(f"y = {y} outside [-1, 1]")
    hit = layout.locate(t)
    if hit is None:
        return ZERO
    slot, tl, side = hit
    if i < 0 or j < 0 or j > slot.params.k:
        raise ValueError(f"derivative order ({i}, {j}) outside the cap")
    scale = slot.lam * (i + j)
    v = _local_deriv(slot.gadget, i, j, tl, y.shift(slot.lam), n + scale)
    # d/dt of the mirrored copy picks up (-1) per t-derivative
    sign = 1 if side > 0 else -(-1) ** i
    return v.shift(scale) * sign


def glue_g_eval(layout: GlueLayout, t: Dyadic, y: Dyadic, n: int) -> Dyadic:
    return glue_deriv_eval(layout, 0, 0, t, y, n)


def glue_h_eval(layout: GlueLayout, t: Dyadic, n: int) -> Dyadic:
    hit = layout.locate(t)
    if hit is None:
        return ZERO
    slot, tl, _ = hit
    return slot.gadget.h_u(tl, n - slot.lam).shift(-slot.lam)
