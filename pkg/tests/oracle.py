"""Truth-table oracle written without the package's evaluator.

The formula is compiled to a Python expression over a bit tuple, the full
truth table over every variable is materialized, and the counting thresholds
are folded bottom-up: the innermost block is summed away first, then the
next, until one bit remains.
"""

import itertools
import re

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|[!&|()])")


def _to_python(expr, order):
    out = []
    pos = 0
    while pos < len(expr):
        m = _TOKEN.match(expr, pos)
        if not m:
            break
        tok = m.group(1)
        pos = m.end()
        out.append({"!": " not ", "&": " and ", "|": " or "}.get(tok) or
                   (tok if tok in "()" else f"x[{order.index(tok)}]"))
    return "".join(out)


def parse(text):
    blocks, thresholds, formula = [], [], None
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "block":
            words = rest.split()
            vi, ti = words.index("vars"), words.index("threshold")
            blocks.append(words[vi + 1:ti])
            thresholds.append(int(words[ti + 1]))
        elif head == "formula":
            formula = rest
    return blocks, thresholds, formula


def truth(text):
    blocks, thresholds, formula = parse(text)
    order = [v for b in blocks for v in b]
    fn = eval("lambda x: bool(" + _to_python(formula, order) + ")")
    # table over all variables, innermost block varying slowest in the key
    table = {bits: int(fn(bits)) for bits in itertools.product((0, 1), repeat=len(order))}
    start = 0
    for block, m in zip(blocks, thresholds):
        width = len(block)
        folded = {}
        for bits, v in table.items():
            rest = bits[:start] + bits[start + width:]
            folded[rest] = folded.get(rest, 0) + v
        table = {rest: int(c >= m) for rest, c in folded.items()}
        order = order[:start] + order[start + width:]
    (value,) = table.values()
    return value
