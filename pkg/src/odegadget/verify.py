"""Batch checks of every identity and bound over a corpus of instances.

Each check yields one :class:`Verdict` per instance (or one global verdict)
with status ``pass``, ``fail`` or ``error``.  A failure always carries a
witness made of exact dyadic inputs and the values seen there.  Reports are
deterministic for a fixed corpus and seed.

Smooth values in faithful mode sit far below ``2**-64``, so every
``n``-bit tolerance is taken relative to the local digit scale
``B**-d_u(j_u(T)+1)`` of the cell being checked.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

from .bump import BUMP, SHIPPED_S
from .diffeq import (BitLayout, CellOverflowError, build_gadget, inject_fault,
                     normalize, recognize, solve)
from .exactreal import (ONE, ZERO, ContractViolation, Dyadic, RealName,
                        bit_reversal_points, cell_points, check_modulus, name_of)
from .formula import (CountingInstance, FormulaSyntaxError, parse_instance,
                      truth_value)
from .gadget import (FinalValueParams, Gadget, GlueLayout, Polynomial,
                     decode_tally, final_value_name, gadget_for, glue_deriv_eval,
                     glue_h_eval, glued_h_oracle, reduce_instance)
from .gadget.params import capped_s, positioning

__all__ = [
    "Corpus", "CorpusEntry", "Verdict", "VerdictReport", "Fault", "FAULTS",
    "CHECKS", "run_suite", "integrate_rk4", "ContainmentError", "TALLY_LANGUAGES",
]

CHECKS = ("oracle", "cellbound", "grid", "final", "boundary", "bounds", "residual",
          "integrate", "seam", "decay", "reduce", "modulus", "finalvalue", "bump")
GLOBAL_CHECKS = ("finalvalue", "bump")

# the four tally languages of the final-value round trip
TALLY_LANGUAGES: Dict[str, Callable[[int], bool]] = {
    "empty": lambda n: False,
    "first": lambda n: n == 0,
    "even": lambda n: n % 2 == 0,
    "primes": lambda n: n in (2, 3, 5, 7),
}


# ------------------------------------------------------------------ corpus


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    instance: CountingInstance
    k: int = 1
    gamma: Polynomial = Polynomial.identity()


@dataclass
class Corpus:
    entries: List[CorpusEntry]
    seed: int = 0

    @classmethod
    def load(cls, directory, seed: Optional[int] = None) -> "Corpus":
        """Read ``*.cqbf`` files, with optional settings from ``corpus.json``.

        The manifest holds ``{"seed": int, "k": int, "gamma": "x",
        "instances": {"file.cqbf": {"k": 2, "gamma": "2x+1"}}}``; every key is
        optional.
        """
        root = Path(directory)
        if not root.is_dir():
            raise FileNotFoundError(f"corpus directory {root} not found")
        manifest = {}
        if (root / "corpus.json").exists():
            manifest = json.loads((root / "corpus.json").read_text())
        default_k = int(manifest.get("k", 1))
        default_gamma = Polynomial.parse(manifest.get("gamma", "x"))
        per = manifest.get("instances", {})
        entries = []
        for path in sorted(root.glob("*.cqbf")):
            try:
                inst = parse_instance(path.read_text())
            except FormulaSyntaxError as exc:
                raise FormulaSyntaxError(f"{path.name}: {exc.message}", exc.line, exc.column) from None
            cfg = per.get(path.name, {})
            gamma = Polynomial.parse(cfg["gamma"]) if "gamma" in cfg else default_gamma
            entries.append(CorpusEntry(path.name, inst, int(cfg.get("k", default_k)), gamma))
        return cls(entries, manifest.get("seed", 0) if seed is None else seed)

    @classmethod
    def of(cls, instances: Iterable, k: int = 1, seed: int = 0) -> "Corpus":
        entries = []
        for idx, item in enumerate(instances):
            inst = parse_instance(item) if isinstance(item, str) else item
            entries.append(CorpusEntry(f"inst{idx:03d}", inst, k))
        return cls(entries, seed)

    def __len__(self) -> int:
        return len(self.entries)


# ------------------------------------------------------------------ report


@dataclass
class Verdict:
    check: str
    instance: str
    status: str
    witness: Optional[dict] = None
    stats: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


@dataclass
class VerdictReport:
    verdicts: List[Verdict]

    @property
    def ok(self) -> bool:
        return all(v.status == "pass" for v in self.verdicts)

    @property
    def status(self) -> str:
        return "pass" if self.ok else "fail"

    def failures(self, check: Optional[str] = None) -> List[Verdict]:
        return [v for v in self.verdicts if v.status != "pass"
                and (check is None or v.check == check)]

    def by_check(self, check: str) -> List[Verdict]:
        return [v for v in self.verdicts if v.check == check]

    def write(self, out: TextIO) -> None:
        for v in self.verdicts:
            out.write(v.to_json() + "\n")

    def summary(self) -> Dict[str, Tuple[int, int]]:
        """``check -> (passed, total)``."""
        out: Dict[str, Tuple[int, int]] = {}
        for v in self.verdicts:
            p, t = out.get(v.check, (0, 0))
            out[v.check] = (p + (v.status == "pass"), t + 1)
        return out


class _Fail(Exception):
    def __init__(self, witness: dict):
        super().__init__(witness)
        self.witness = witness


def _require(cond: bool, **witness) -> None:
    if not cond:
        raise _Fail({k: str(v) for k, v in witness.items()})


# ------------------------------------------------------------------ faults


@dataclass(frozen=True)
class Fault:
    """A single-point corruption; ``kind`` is one of :data:`FAULTS`."""

    kind: str


FAULTS = {
    "deposit": "toggle the top-row deposit step of the normalized equation",
    "row0": "negate the row-0 -1 step taken where row 1 peaks",
    "gadget-cell": "negate one -1 step of the equation behind h_u only",
    "b-exponent": "raise log2 B by one inside the gadget",
    "g-sign": "negate g_u while leaving h_u alone",
    "positioning": "use linear digit positions d_u(i) = i with k >= 2 and B = 2**r",
    "oracle": "name oracle answering off the 2**-n grid",
    "tally": "flip the term for bit 3 in the final-value name",
    "s-table": "lower every shipped bump bound exponent by one",
}


def _first_step(eq, sol, want: int, row: Optional[int] = None, limit: Optional[int] = None):
    """First column ``T`` whose step along ``sol`` equals ``want``."""
    for T in range(eq.width if limit is None else limit):
        i = eq.active_row(T) if eq.active_row else row
        if row is not None and i != row:
            continue
        if eq.step(i, T, sol(i, T)) == want:
            return i, T
    return None


class _Context:
    """Builds (possibly faulted) gadgets and layouts, memoized per entry."""

    def __init__(self, corpus: Corpus, fault: Optional[Fault], mode: str):
        self.corpus = corpus
        self.fault = fault.kind if fault else None
        self.mode = mode
        self._gadgets: Dict[str, Gadget] = {}
        self._layout: Optional[GlueLayout] = None

    def clean(self, e: CorpusEntry) -> Gadget:
        return gadget_for(e.instance, e.k, e.gamma, self.mode)

    def gadget(self, e: CorpusEntry) -> Gadget:
        hit = self._gadgets.get(e.name)
        if hit is not None:
            return hit
        base = self.clean(e)
        gad = base
        if self.fault == "gadget-cell":
            loc = _first_step(base.eq, base.solution, -1)
            if loc is not None:
                ng = dataclasses.replace(base.ng, equation=inject_fault(base.eq, *loc))
                gad = Gadget(ng, base.params, e.instance)
        elif self.fault == "b-exponent":
            gad = Gadget(base.ng, dataclasses.replace(base.params, log2B=base.params.log2B + 1),
                         e.instance)
        elif self.fault == "g-sign":
            gad = Gadget(base.ng, base.params, e.instance)
            gad.g_sign = -1
        elif self.fault == "positioning":
            k = max(2, e.k)
            p = base.params
            params = dataclasses.replace(p, k=k, log2B=p.r, d=positioning(k, p.p, "linear"))
            gad = Gadget(base.ng, params, e.instance)
        self._gadgets[e.name] = gad
        return gad

    def equation(self, e: CorpusEntry):
        eq = build_gadget(e.instance)
        if self.fault == "row0":
            # the row-0 decrement taken where row 1 peaks
            sol = solve(eq)
            downs = [T for T in range(eq.width) if eq.step(0, T, 0) == -1]
            if downs:
                T = max(downs, key=lambda c: (sol(1, c), -c))
                eq = inject_fault(eq, 0, T)
        ng = normalize(eq)
        if self.fault == "deposit":
            neq = ng.equation
            sol = solve(neq)
            top = neq.height - 1
            forward = ng.original.width * ng.serial
            cols = [T for T in range(forward) if neq.active_row(T) == top]
            hits = [T for T in cols if neq.step(top, T, sol(top, T))]
            T = hits[-1] if hits else cols[-1]
            ng = dataclasses.replace(ng, equation=inject_fault(neq, top, T, "toggle"))
        return ng

    def layout(self) -> GlueLayout:
        if self._layout is None:
            self._layout = GlueLayout.build([e.instance for e in self.corpus.entries],
                                            ks=[e.k for e in self.corpus.entries],
                                            mode=self.mode)
        return self._layout


# ------------------------------------------------------------------ helpers


def _rel(gad: Gadget, T: int, extra: int = 64) -> int:
    """Absolute precision giving ``extra`` bits below the digit moved in column ``T``."""
    return extra + gad.cell_scale_exp(min(T, gad.width - 1))


def _y_samples(gad: Gadget, T: int) -> List[Tuple[str, Dyadic]]:
    """Points ``y`` in the dead zone and in the blend zone of column ``T``."""
    p = gad.params
    j = gad.active_row(min(T, gad.width - 1))
    inst = gad.instance
    bases = {gad.solution(j, min(T, gad.width - 1))}
    if inst is not None and j >= 1 and j - 1 < len(inst.thresholds):
        # straddle the threshold so that G(Y) and G(Y+1) differ
        bases.add(max(inst.thresholds[j - 1] - 1, 0))
    out = []
    for Y in sorted(bases):
        for eta in (Dyadic(0), Dyadic(3, -3), Dyadic(1, -1), Dyadic(5, -3), Dyadic(11, -4)):
            out.append((f"Y={Y},eta={eta}", (Dyadic(Y) + eta).shift(-p.digit_exp(j))))
    return out


# ------------------------------------------------------------------ checks


def _check_oracle(ctx: _Context, e: CorpusEntry) -> dict:
    ng = ctx.equation(e)
    got = recognize(ng.equation)
    want = truth_value(e.instance)
    _require(got == want, recognized=got, expected=want)
    return {"width": ng.equation.width}


def _check_cellbound(ctx: _Context, e: CorpusEntry) -> dict:
    ng = ctx.equation(e)
    try:
        sol = solve(ng.equation)
    except CellOverflowError as exc:
        raise _Fail({"i": str(exc.i), "T": str(exc.T), "value": str(exc.value)})
    sizes = e.instance.block_sizes
    for i in range(1, ng.equation.height + 1):
        cap = 1 << sizes[i - 1] if i <= len(sizes) else 1
        col = max(range(len(sol.columns)), key=lambda T: sol(i, T))
        _require(sol(i, col) <= cap, i=i, T=col, H=sol(i, col), bound=cap)
        low = min(range(len(sol.columns)), key=lambda T: sol(i, T))
        _require(sol(i, low) >= 0, i=i, T=low, H=sol(i, low))
    return {"rows": ng.equation.height}


def _check_grid(ctx: _Context, e: CorpusEntry) -> dict:
    gad = ctx.gadget(e)
    clean = ctx.clean(e)
    p = gad.params
    # independent side: fresh equation and digits from the formula for B
    eq = normalize(build_gadget(e.instance)).equation
    sol = solve(eq)
    log2B = p.gamma(p.size) + p.size + capped_s(p.k) + p.k + 3 if p.mode == "faithful" else clean.params.log2B
    d = positioning(p.k, p.p)
    for T in range(eq.width + 1):
        want = ZERO
        for i, v in enumerate(sol.columns[T]):
            if v:
                want = want + Dyadic(v, -log2B * d[i])
        got = gad.h_u(Dyadic(T, -p.q), 64)
        _require(got == want, t=Dyadic(T, -p.q), h_u=got, expected=want)
    return {"points": eq.width + 1}


def _check_final(ctx: _Context, e: CorpusEntry) -> dict:
    gad = ctx.gadget(e)
    p = ctx.clean(e).params
    L = truth_value(e.instance)
    if p.mode == "faithful":
        rho = p.sigma * (p.gamma(p.size) + p.size + capped_s(p.k) + p.k + 3)
    else:
        rho = p.sigma * p.log2B
    want = Dyadic(L, -rho)
    got = gad.h_u(ONE, 64)
    _require(got == want, t=1, h_u=got, expected=want, L=L, rho=rho)
    layout = ctx.layout()
    slot = layout.slot_for(e.instance)
    glued = glue_h_eval(layout, slot.centre, 64)
    want_glued = slot.gadget.final_value().shift(-slot.lam)
    sp = slot.params
    rho_glue = sp.sigma * (sp.gamma(sp.size) + sp.size + capped_s(sp.k) + sp.k + 3)
    _require(glued == Dyadic(L, -(rho_glue + slot.lam)) and glued == want_glued,
             t=slot.centre, h=glued, expected=Dyadic(L, -(rho_glue + slot.lam)))
    _require(glue_h_eval(layout, slot.lo, 64) == 0 and glue_h_eval(layout, slot.hi, 64) == 0,
             t=slot.lo, note="h must vanish at both interval ends")
    return {"rho": rho}


def _check_boundary(ctx: _Context, e: CorpusEntry) -> dict:
    gad = ctx.gadget(e)
    ys = [Dyadic(0), ONE, -ONE, Dyadic(1, -1), Dyadic(-3, -2)]
    ys += [y for _, y in _y_samples(gad, 0)]
    count = 0
    for t in (ZERO, ONE):
        for y in ys:
            for i in range(5):
                v = gad.deriv(i, 0, t, y, 64)
                count += 1
                _require(v == 0, i=i, t=t, y=y, value=v)
    return {"points": count}


def _check_bounds(ctx: _Context, e: CorpusEntry, samples: int) -> dict:
    gad = ctx.gadget(e)
    p = gad.params
    count = 0
    for t in cell_points(samples, p.q, 8, ctx.corpus.seed):
        T, _ = gad.split_t(t)
        for label, y in _y_samples(gad, T):
            for j in range(p.k + 1):
                n = _rel(gad, T) + j * p.log2B
                for i in range(4):
                    v = gad.deriv(i, j, t, y, n)
                    bound = Dyadic(1, gad.bound_exp(i)) + Dyadic(1, 1 - n)
                    count += 1
                    _require(abs(v) <= bound, i=i, j=j, t=t, y=y, value=v, bound=bound)
    return {"points": count}


def _check_residual(ctx: _Context, e: CorpusEntry, samples: int) -> dict:
    gad = ctx.gadget(e)
    p = gad.params
    q = p.q
    delta = Dyadic(1, -q - 4)
    nonzero = 0
    for t in cell_points(samples, q, 8, ctx.corpus.seed):
        if t + delta > 1:
            continue
        T0, _ = gad.split_t(t)
        T1, _ = gad.split_t(t + delta)
        scale = min(gad.cell_scale_exp(min(T, gad.width - 1)) for T in (T0, T1))
        n = 64 + scale
        h0 = gad.h_u(t, n + q + 5)
        h1 = gad.h_u(t + delta, n + q + 5)
        g = gad.g_u(t, h0, n)
        nonzero += bool(g)
        res = (h1 - h0).shift(q + 4) - g
        M2 = Dyadic(1, 2 * q + capped_s(2) - scale)
        tol = (delta * M2).shift(-1) + Dyadic(1, 2 - n)
        _require(abs(res) <= tol, t=t, delta=delta, residual=res, tolerance=tol, g=g)
    return {"points": samples, "nonzero": nonzero}


class ContainmentError(ArithmeticError):
    def __init__(self, t: Dyadic, y: Dyadic):
        super().__init__(f"trajectory left [-1, 1] at t = {t}: y = {y}")
        self.t = t
        self.y = y


def _div_floor(x: Dyadic, m: int, n: int) -> Dyadic:
    return Dyadic((x.to_fraction() * (1 << n) / m).__floor__(), -n) if m != 1 else x


def integrate_rk4(g: Callable[[Dyadic, Dyadic, int], Dyadic], t0: Dyadic, h0: Dyadic,
                  step: Dyadic, steps: int, n: int) -> List[Tuple[Dyadic, Dyadic]]:
    """Classical RK4 for ``y' = g(t, y)`` with every stage rounded to ``2**-n``."""
    t, y = Dyadic.of(t0), Dyadic.of(h0)
    half = step.shift(-1)
    out = [(t, y)]
    for _ in range(steps):
        k1 = g(t, y, n)
        k2 = g(t + half, (y + half * k1).round_to(n), n)
        k3 = g(t + half, (y + half * k2).round_to(n), n)
        k4 = g(t + step, (y + step * k3).round_to(n), n)
        incr = step * (k1 + k2.shift(1) + k3.shift(1) + k4)
        y = (y + _div_floor(incr, 6, n + 1)).round_to(n)
        t = t + step
        if abs(y) > 1:
            raise ContainmentError(t, y)
        out.append((t, y))
    return out


def _rk4_error(gad: Gadget, t0: Dyadic, t1: Dyadic, steps: int, n: int) -> Dyadic:
    if steps < 1 or steps & (steps - 1):
        raise ValueError("steps must be a power of two")
    step = (t1 - t0).shift(1 - steps.bit_length())
    traj = integrate_rk4(gad.g_u, t0, gad.h_u(t0, n + 8), step, steps, n)
    return abs(traj[-1][1] - gad.h_u(t1, n + 8))


def _check_integrate(ctx: _Context, e: CorpusEntry, cells: int = 8, steps: int = 16) -> dict:
    gad = ctx.gadget(e)
    p = gad.params
    q = p.q
    active = [T for T in range(gad.width) if gad.G(T, gad.solution(gad.active_row(T), T))]
    # moving cells first, then still ones, which RK4 must leave unchanged
    moving = set(active)
    still = [T for T in range(gad.width) if T not in moving]
    chosen = (active + still)[:cells]
    step = Dyadic(1, -q - steps.bit_length() + 1)
    ratios = []
    for T in chosen:
        scale = gad.cell_scale_exp(T)
        n = 64 + scale
        t0, t1 = Dyadic(T, -q), Dyadic(T + 1, -q)
        err = _rk4_error(gad, t0, t1, steps, n)
        # RK4 on a y-independent right-hand side is Simpson's rule
        M5 = Dyadic(1, 5 * q + capped_s(5) - scale)
        envelope = _div_floor(step * step * step * step * step * M5 * steps, 2880, n + 8)
        envelope = envelope + Dyadic(steps + 1, 2 - n)
        _require(err <= envelope, T=T, error=err, envelope=envelope, steps=steps)
    if active:
        # order ratio on an interior window, where f is far from its flat ends
        T = active[0]
        n = 96 + gad.cell_scale_exp(T)
        t0 = Dyadic(8 * T + 1, -q - 3)
        t1 = Dyadic(8 * T + 5, -q - 3)
        coarse = _rk4_error(gad, t0, t1, 16, n)
        fine = _rk4_error(gad, t0, t1, 32, n)
        _require(fine > 0, T=T, coarse=coarse, fine=fine, note="fine error vanished")
        ratio = coarse.to_fraction() / fine.to_fraction()
        ratios.append(float(ratio))
        _require(8 <= ratio <= 32, T=T, ratio=float(ratio), coarse=coarse, fine=fine)
    return {"cells": len(chosen), "order_ratio": ratios[0] if ratios else None}


def _check_seam(ctx: _Context, e: CorpusEntry, samples: int) -> dict:
    gad = ctx.gadget(e)
    p = gad.params
    eps = Dyadic(1, -20)
    lip = Dyadic(1, gad.bound_exp(0))      # bounds D^(0,1) g_u
    count = 0
    for t in cell_points(samples, p.q, 8, ctx.corpus.seed + 1):
        T, _ = gad.split_t(t)
        j = gad.active_row(T)
        n = _rel(gad, T)
        for Y in sorted({gad.decompose(t, y).Y for _, y in _y_samples(gad, T)}):
            for seam in (Dyadic(1, -2), Dyadic(3, -2)):
                lo = (Dyadic(Y) + seam - eps).shift(-p.digit_exp(j))
                hi = (Dyadic(Y) + seam + eps).shift(-p.digit_exp(j))
                a, b = gad.g_u(t, lo, n), gad.g_u(t, hi, n)
                tol = lip * (hi - lo) + Dyadic(1, 1 - n)
                count += 1
                _require(abs(a - b) <= tol, t=t, y_lo=lo, y_hi=hi, g_lo=a, g_hi=b, tolerance=tol)
    # Taylor extension seams of the glued g at local y = +-1: D_2^j g for j < k
    # is continuous there, with D_2^(j+1) g <= 2 Lambda^(j+1) 2**(mu(0) - gamma)
    layout = ctx.layout()
    slot = layout.slot_for(e.instance)
    sg = slot.gadget
    for t in cell_points(8, sg.params.q, 8, ctx.corpus.seed):
        T, _ = sg.split_t(t)
        s = slot.lo + t.shift(-slot.lam)
        n = 64 + sg.cell_scale_exp(T)
        for anchor in (1, -1):
            centre = Dyadic(anchor).shift(-slot.lam)
            lo, hi = centre - eps.shift(-slot.lam), centre + eps.shift(-slot.lam)
            for j in range(sg.params.k):
                a = glue_deriv_eval(layout, 0, j, s, lo, n)
                b = glue_deriv_eval(layout, 0, j, s, hi, n)
                slope = Dyadic(1, sg.bound_exp(0) + slot.lam * (j + 1) + 1)
                tol = slope * (hi - lo) + Dyadic(1, 1 - n)
                count += 1
                _require(abs(a - b) <= tol, s=s, j=j, y_lo=lo, y_hi=hi, lo_value=a,
                         hi_value=b, tolerance=tol)
    return {"points": count}


def _check_decay(ctx: _Context, e: CorpusEntry, samples: int) -> dict:
    layout = ctx.layout()
    slot = layout.slot_for(e.instance)
    bound = Dyadic(1, -2 * slot.size)
    n = 2 * slot.size + 8
    slack = Dyadic(1, -n)
    ys = [ZERO, ONE, -ONE, Dyadic(1, -1), Dyadic(1, -slot.lam - 1), Dyadic(-1, -slot.lam - 1)]
    count = 0
    for t in cell_points(samples, slot.params.q, 8, ctx.corpus.seed):
        for s in (slot.lo + t.shift(-slot.lam), slot.hi - t.shift(-slot.lam)):
            for y in ys:
                for i in range(1, 4):
                    for j in range(slot.params.k + 1):
                        v = glue_deriv_eval(layout, i - 1, j, s, y, n)
                        count += 1
                        _require(abs(v) + slack <= bound, s=s, y=y, i=i - 1, j=j, value=v, bound=bound)
    return {"points": count}


def _check_reduce(ctx: _Context, e: CorpusEntry) -> dict:
    layout = ctx.layout()
    oracle = glued_h_oracle(layout)
    if ctx.fault == "oracle":
        good = oracle

        def oracle(t_name, bits):
            honest = good(t_name, bits)
            # answers shifted by half a unit: never a multiple of 2**-n
            return RealName(lambda n: honest.query(n) + Dyadic(1, -n - 1), "broken")
    want = truth_value(e.instance)
    try:
        got = reduce_instance(e.instance, oracle, layout)
    except ContractViolation as exc:
        raise _Fail({"error": "ContractViolation", "message": str(exc)})
    _require(got == want, reduced=got, expected=want)
    return {}


def _check_modulus(ctx: _Context, e: CorpusEntry) -> dict:
    gad = ctx.gadget(e)

    def fname(x: Dyadic) -> RealName:
        return name_of(lambda prec: _point_enclosure(gad.h_u(x, prec + 1), prec + 1))

    # |h_u'| <= 1, so p(n) = n is a modulus
    verdict = check_modulus(fname, lambda n: n, offset=ctx.corpus.seed)
    _require(verdict.ok, **(verdict.witness or {}))
    return {"points": verdict.checked}


def _point_enclosure(v: Dyadic, n: int):
    from .exactreal import DyadicInterval
    slack = Dyadic(1, -n)
    return DyadicInterval(v - slack, v + slack)


def _check_finalvalue(ctx: _Context) -> dict:
    params = FinalValueParams.build(1)
    exps = params.exponents()
    _require(all(a < b for a, b in zip(exps, exps[1:])), exponents=exps)
    for label, lang in TALLY_LANGUAGES.items():
        name = final_value_name(lang, params)
        if ctx.fault == "tally":
            flip = Dyadic(1, -params.exponent(3))
            value = sum((Dyadic(1, -params.exponent(m)) for m in range(params.horizon)
                         if lang(m)), ZERO)
            name = name_of(value - flip if lang(3) else value + flip, label="flipped")
        for n in range(params.horizon):
            got = decode_tally(name, n, params)
            _require(got == int(bool(lang(n))), language=label, bit=n, decoded=got)
    return {"languages": len(TALLY_LANGUAGES), "horizon": params.horizon}


def _check_bump(ctx: _Context, samples: int = 1 << 12) -> dict:
    table = list(SHIPPED_S)
    if ctx.fault == "s-table":
        table = [max(v - 1, 0) if m else v for m, v in enumerate(table)]
    _require(BUMP.f_eval(ZERO, 64) == 0, t=0)
    _require(BUMP.f_eval(ONE, 64) == 1, t=1)
    n = 40
    for t in bit_reversal_points(64, 12, ctx.corpus.seed):
        a, b = BUMP.f_eval(t, n), BUMP.f_eval(ONE - t, n)
        _require(abs(a + b - 1) <= Dyadic(1, 1 - n), t=t, f_t=a, f_1mt=b)
    # dense sampling on [0, 1/2]; the other half follows by symmetry
    half = samples // 2
    shift = samples.bit_length() - 1
    for m in range(1, 5):
        bound = Dyadic(1, table[m])
        for k in range(half + 1):
            t = Dyadic(k, -shift)
            v = BUMP.df_eval(m, t, 24)
            _require(abs(v) <= bound, m=m, t=t, value=v, bound=bound)
    # derivative against central differences of the previous order
    h = Dyadic(1, -12)
    for m in range(1, 5):
        M3 = Dyadic(1, SHIPPED_S[m + 2] if m + 2 < len(SHIPPED_S) else SHIPPED_S[-1])
        for t in bit_reversal_points(16, 6, 1):
            t = t + Dyadic(1, -8)   # keep t +- h inside (0, 1)
            fd = (BUMP.df_eval(m - 1, t + h, 48) - BUMP.df_eval(m - 1, t - h, 48)).shift(11)
            d = BUMP.df_eval(m, t, 48)
            # h**2/6 sup|D^(m+2) f| plus evaluation error magnified by 1/(2h)
            tol = (M3 * h * h).shift(-2) + Dyadic(1, -34)
            _require(abs(fd - d) <= tol, m=m, t=t, derivative=d, difference=fd, tolerance=tol)
    return {"samples": samples}


# ------------------------------------------------------------------- suite


def run_suite(corpus: Corpus, checks: Sequence[str] = CHECKS, fault: Optional[Fault] = None,
              mode: str = "faithful", samples: int = 256, timings: bool = False) -> VerdictReport:
    """Run the named checks; one verdict per (check, instance), sorted."""
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}; choose from {', '.join(CHECKS)}")
    if fault is not None and fault.kind not in FAULTS:
        raise ValueError(f"unknown fault {fault.kind!r}")
    ctx = _Context(corpus, fault, mode)
    small = max(samples // 8, 8)
    per_instance = {
        "oracle": _check_oracle,
        "cellbound": _check_cellbound,
        "grid": _check_grid,
        "final": _check_final,
        "boundary": _check_boundary,
        "bounds": lambda c, e: _check_bounds(c, e, small),
        "residual": lambda c, e: _check_residual(c, e, samples),
        "integrate": _check_integrate,
        "seam": lambda c, e: _check_seam(c, e, small),
        "decay": lambda c, e: _check_decay(c, e, small),
        "reduce": _check_reduce,
        "modulus": _check_modulus,
    }
    verdicts: List[Verdict] = []

    def run(check: str, name: str, fn) -> None:
        start = time.perf_counter()
        try:
            stats = fn() or {}
            status, witness = "pass", None
        except _Fail as exc:
            status, witness, stats = "fail", exc.witness, {}
        except Exception as exc:   # recorded, never aborts the suite
            status, witness, stats = "error", {"error": type(exc).__name__, "message": str(exc)}, {}
        if timings:
            stats["seconds"] = round(time.perf_counter() - start, 3)
        verdicts.append(Verdict(check, name, status, witness, stats))

    for check in checks:
        if check == "finalvalue":
            if corpus.entries:
                run(check, "-", lambda: _check_finalvalue(ctx))
        elif check == "bump":
            if corpus.entries:
                run(check, "-", lambda: _check_bump(ctx))
        else:
            fn = per_instance[check]
            for e in corpus.entries:
                run(check, e.name, lambda e=e: fn(ctx, e))
    verdicts.sort(key=lambda v: (v.check, v.instance))
    return VerdictReport(verdicts)
