"""Regenerate the stored fixtures under src/lincomplex/data.

    python scripts/make_fixtures.py

Every fixture records the seed that produced it.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

from lincomplex.partitions import LinePartition, trivial_partition, write_partition
from lincomplex.projspace import lift, subspaces, whole
from lincomplex.spreads import (
    LineSpread,
    carrier_lines,
    is_geometric,
    is_linear,
    is_spread,
    random_line_spread,
    write_lines,
)

DATA = Path(__file__).resolve().parent.parent / "src" / "lincomplex" / "data"


def exact_cover(columns, rows, rng):
    """Knuth's Algorithm X over dict-of-sets; yields the first solution found."""
    cols = {c: set() for c in columns}
    for r, cs in rows.items():
        for c in cs:
            cols[c].add(r)

    def select(r):
        removed = []
        for j in rows[r]:
            for i in cols[j]:
                for k in rows[i]:
                    if k != j:
                        cols[k].remove(i)
            removed.append(cols.pop(j))
        return removed

    def deselect(r, removed):
        for j in reversed(rows[r]):
            cols[j] = removed.pop()
            for i in cols[j]:
                for k in rows[i]:
                    if k != j:
                        cols[k].add(i)

    sol = []

    def search():
        if not cols:
            return True
        c = min(cols, key=lambda c: len(cols[c]))
        cand = list(cols[c])
        rng.shuffle(cand)
        for r in cand:
            sol.append(r)
            removed = select(r)
            if search():
                return True
            deselect(r, removed)
            sol.pop()
        return False

    return sol if search() else None


def line_partition(n: int, q: int, seed: int) -> LinePartition:
    """A line partition of PG(n, q) by exact cover over (hyperplane, spread) choices."""
    rng = random.Random(seed)
    lines = subspaces(n, q, 1)
    lidx = {l: i for i, l in enumerate(lines)}
    local_lines = subspaces(n - 1, q, 1)
    # all spreads of PG(n-1, q) as local line-index sets
    pts = subspaces(n - 1, q, 0)
    pidx = {p.rows[0]: i for i, p in enumerate(pts)}
    lp = [frozenset(pidx[v] for v in l.points()) for l in local_lines]
    spread_rows = {i: lp[i] | {("line", i)} for i in range(len(lp))}
    local_spreads = []

    def extend(chosen, covered):
        if len(covered) == len(pts):
            local_spreads.append(tuple(chosen))
            return
        p = min(set(range(len(pts))) - covered)
        for i, s in enumerate(lp):
            if p in s and not (s & covered):
                extend(chosen + [i], covered | s)

    extend([], frozenset())
    rows = {}
    for hi, hyp in enumerate(subspaces(n, q, n - 1)):
        glob = [lidx[lift(l, hyp)] for l in local_lines]
        for si, s in enumerate(local_spreads):
            rows[(hi, si)] = [("H", hi)] + [("L", glob[i]) for i in s]
    columns = [("H", i) for i in range(len(subspaces(n, q, n - 1)))] + [("L", i) for i in range(len(lines))]
    sol = exact_cover(columns, rows, rng)
    if sol is None:
        raise RuntimeError("no line partition")
    hyps = subspaces(n, q, n - 1)
    classes = {}
    for hi, si in sol:
        hyp = hyps[hi]
        classes[hyp] = tuple(sorted(lines[c[1]] for c in rows[(hi, si)][1:]))
    return LinePartition(n, q, classes)


def main() -> int:
    DATA.mkdir(parents=True, exist_ok=True)
    # non-geometric, non-linear spread of PG(5,2)
    seed = 1
    sp = random_line_spread(whole(5, 2), seed)
    assert is_spread(sp.lines, sp.carrier) and not is_geometric(sp) and not is_linear(sp)[0]
    write_lines(DATA / "pg52_random_spread.txt", sp.lines,
                header=f"random line spread of PG(5,2), random_line_spread(seed={seed})\n"
                       "not geometric, not linear")
    for q in (2, 3):
        write_partition(DATA / f"pg2{q}_trivial_partition.txt", trivial_partition(q),
                        header=f"trivial line partition of PG(2,{q})")
    # malformed: PG(2,2) with one class dropped
    om = trivial_partition(2)
    dropped = dict(list(om.classes.items())[1:])
    write_partition(DATA / "pg22_dropped_class.txt", LinePartition(2, 2, dropped),
                    header="PG(2,2) trivial partition with its first class removed")
    seed = 7
    om = line_partition(4, 2, seed)
    write_partition(DATA / "pg42_partition.txt", om,
                    header=f"line partition of PG(4,2), exact cover search with seed {seed}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
