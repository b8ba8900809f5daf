"""Regenerate the shipped instance corpus.

    python scripts/make_corpus.py corpus/main --seed 7

Instances have at most three blocks and at most ten variables.  Thresholds
are drawn from three kinds: trivial (0 or 1), tight (exactly the largest
count reached by the block) and unachievable (above 2**l).
"""

import argparse
import json
import random
from pathlib import Path

from odegadget.formula import (And, CountingInstance, Not, Or, Var, count_models,
                               parse_instance, truth_value)

HAND_PICKED = [
    ("smoke", "blocks 1\nblock 1 vars a threshold 1\nformula a\n"),
    ("contradiction", "blocks 1\nblock 1 vars a threshold 1\nformula a & !a\n"),
    ("tautology2", "blocks 2\nblock 1 vars a threshold 1\nblock 2 vars b threshold 2\nformula a | !a\n"),
    ("majority3", "blocks 1\nblock 1 vars a b c threshold 4\nformula a & b | a & c | b & c\n"),
    ("forall_exists", "blocks 2\nblock 1 vars x threshold 1\nblock 2 vars y threshold 2\n"
                      "formula x & y | !x & !y\n"),
]


def random_formula(rng, names, depth):
    if depth == 0 or rng.random() < 0.25:
        v = Var(rng.choice(names))
        return Not(v) if rng.random() < 0.3 else v
    op = rng.choice((And, Or, Or, And, Not))
    if op is Not:
        return Not(random_formula(rng, names, depth - 1))
    return op(random_formula(rng, names, depth - 1), random_formula(rng, names, depth - 1))


def max_count(phi, blocks, i):
    """Largest count of satisfying block-1 assignments over the outer blocks (i = 1 only)."""
    outer = [v for b in blocks[1:] for v in b]
    best = 0
    for idx in range(1 << len(outer)):
        fixed = {v: (idx >> k) & 1 for k, v in enumerate(outer)}
        best = max(best, count_models(phi, blocks[0], fixed))
    return best


def make(rng, n, sizes, kinds):
    names = [f"x{i}" for i in range(sum(sizes))]
    blocks, pos = [], 0
    for s in sizes:
        blocks.append(tuple(names[pos:pos + s]))
        pos += s
    phi = random_formula(rng, names, 3)
    thresholds = []
    for i, (s, kind) in enumerate(zip(sizes, kinds)):
        if kind == "trivial":
            m = rng.choice((0, 1))
        elif kind == "unachievable":
            m = (1 << s) + rng.choice((1, 2))
        elif i == 0:
            m = max(max_count(phi, blocks, 0), 1)
        else:
            m = rng.randint(1, 1 << s)
        thresholds.append(m)
    return CountingInstance(phi, tuple(blocks), tuple(thresholds))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--count", type=int, default=55)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for old in out.glob("*.cqbf"):
        old.unlink()
    manifest = {"seed": args.seed, "k": 1, "gamma": "x", "instances": {}}
    seen = set()
    items = [(name, parse_instance(text)) for name, text in HAND_PICKED]
    kinds_cycle = ("trivial", "tight", "unachievable")
    idx = 0
    while len(items) < args.count:
        n = rng.choice((1, 2, 2, 3))
        budget = rng.choice((4, 5, 6, 6, 7, 8, 10))
        sizes = [1] * n
        for _ in range(rng.randint(0, budget - n)):
            sizes[rng.randrange(n)] += 1
        kinds = [kinds_cycle[(idx + b) % 3] if rng.random() < 0.5 else "tight" for b in range(n)]
        inst = make(rng, n, sizes, kinds)
        key = inst.serialize()
        if key in seen:
            continue
        seen.add(key)
        items.append((f"r{idx:03d}_n{n}_l{sum(sizes)}", inst))
        idx += 1
    for pos, (name, inst) in enumerate(items):
        fname = f"{name}.cqbf"
        (out / fname).write_text(f"# truth value {truth_value(inst)}\n" + inst.serialize())
        # spread the smoothness order; k = 3 only where the digit table stays short
        k = 1 + pos % 3
        if k == 3 and (inst.n > 2 or sum(inst.block_sizes) > 6):
            k = 2
        if k != 1:
            manifest["instances"][fname] = {"k": k}
    (out / "corpus.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(items)} instances to {out}")


if __name__ == "__main__":
    main()
