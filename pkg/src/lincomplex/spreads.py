"""Line spreads of a carrier subspace and the predicates on them."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import linalg
from .complexes import ComplexError, LinearComplex, singular_locus
from .exterior import pluecker, pluecker_matrix
from .gf import field_create
from .projspace import (
    GeometryError,
    Subspace,
    count_subspaces,
    hyperplane_covector,
    lift,
    parse_subspace,
    format_subspace,
    span,
    subspaces,
    whole,
)


class NotSingularFree(ComplexError):
    pass


@dataclass(frozen=True)
class LineSpread:
    carrier: Subspace
    lines: tuple[Subspace, ...]

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)


class CandidateSpread(NamedTuple):
    carrier: Subspace
    lines: tuple[Subspace, ...]
    is_spread: bool


def pluecker_ambient_dim(n: int) -> int:
    """M = (n^2 + n - 2) / 2, the dimension of the line Plücker space of PG(n, q)."""
    return (n * n + n - 2) // 2


def _point_sets(lines: Iterable[Subspace]) -> list[frozenset]:
    return [frozenset(l.points()) for l in lines]


def is_spread(lines: Iterable[Subspace], carrier: Subspace) -> bool:
    """Lines pairwise disjoint and covering every point of the carrier."""
    lines = list(lines)
    for l in lines:
        if l.dim != 1:
            raise GeometryError(f"{l} is not a line")
        if not carrier.contains(l):
            raise GeometryError(f"line {l} is not contained in the carrier")
    seen: set = set()
    for pts in _point_sets(lines):
        if seen & pts:
            return False
        seen |= pts
    return len(seen) == count_subspaces(carrier.dim, carrier.q, 0)


def is_geometric(spread: LineSpread) -> bool:
    """Every solid spanned by two spread lines is covered by the spread lines inside it."""
    q = spread.carrier.q
    lines = list(spread.lines)
    pts = _point_sets(lines)
    for i, j in combinations(range(len(lines)), 2):
        solid = frozenset(lines[i].join(lines[j]).points())
        inside = [k for k, p in enumerate(pts) if p <= solid]
        if len(inside) != q * q + 1:
            return False
    return True


def carrier_lines(carrier: Subspace) -> list[Subspace]:
    return [lift(l, carrier) for l in subspaces(carrier.dim, carrier.q, 1)]


def is_linear(spread: LineSpread) -> tuple[bool, int]:
    """(linear?, projective dimension of the span of the Plücker images).

    Linear means the decomposable points of that span which are lines of the
    carrier are exactly the spread lines.
    """
    f = field_create(spread.carrier.q)
    images = [pluecker(l).coeffs for l in spread.lines]
    red, _ = linalg.rref(images, f)
    ann = linalg.nullspace(red, len(images[0]), f)
    in_span = set()
    for l in carrier_lines(spread.carrier):
        p = pluecker(l).coeffs
        if all(linalg.dot(a, p, f) == 0 for a in ann):
            in_span.add(l)
    return in_span == set(spread.lines), len(red) - 1


def polar_line_covectors(k: LinearComplex) -> np.ndarray:
    if k.h != 2:
        raise ComplexError("line spreads come from complexes of planes (h = 2)")
    return k.polar_covectors()


def spread_from_complex(k: LinearComplex, hyp: Subspace, strict: bool = True):
    """F_H: the lines whose polar hyperplane is H.

    Strict mode insists on a complex without singular lines and returns a
    verified :class:`LineSpread`; otherwise a :class:`CandidateSpread`.
    """
    if hyp.dim != k.n - 1:
        raise GeometryError("expected a hyperplane")
    cov = polar_line_covectors(k)
    target = np.asarray(hyperplane_covector(hyp))
    alll = subspaces(k.n, k.q, 1)
    lines = tuple(alll[i] for i in np.flatnonzero((cov == target).all(axis=1)))
    if not strict:
        return CandidateSpread(hyp, lines, is_spread(lines, hyp))
    if not cov.any(axis=1).all():
        raise NotSingularFree("the complex has singular lines")
    if k.n % 2:
        raise AssertionError("a complex of planes without singular lines in odd dimension")
    sp = LineSpread(hyp, lines)
    if not is_spread(lines, hyp):
        raise AssertionError("F_H is not a spread although the complex has no singular line")
    lin, dim = is_linear(sp)
    if not lin or dim != pluecker_ambient_dim(k.n) - k.n:
        raise AssertionError(f"F_H should be linear with span dimension M-n, got {lin}, {dim}")
    if is_geometric(sp):
        raise AssertionError("F_H is geometric over a finite field")
    return sp


def field_reduction_spread(m: int, q: int) -> LineSpread:
    """Desarguesian line spread of PG(2m-1, q) from the points of PG(m-1, q^2).

    GF(q^2) elements are read as GF(q)-coordinate pairs (c0, c1) of c0 + c1 x,
    so q must be prime.
    """
    if m not in (2, 3):
        raise ValueError("field reduction is provided for m in {2, 3}")
    big = field_create(q * q)
    if not field_create(q).is_prime:
        raise ValueError("field reduction needs a prime q")
    omega = q  # the element x

    def expand(vec):
        return [d for a in vec for d in (a % q, a // q)]

    lines = []
    for p in subspaces(m - 1, q * q, 0):
        v = p.rows[0]
        w = [big.mul(omega, a) for a in v]
        lines.append(span([expand(v), expand(w)], q))
    n = 2 * m - 1
    return LineSpread(whole(n, q), tuple(sorted(lines)))


def random_line_spread(carrier: Subspace, seed: int, max_restarts: int = 1000) -> LineSpread:
    """Seeded randomised backtracking search for a line spread of the carrier."""
    if carrier.dim % 2 == 0:
        raise GeometryError(f"PG({carrier.dim},{carrier.q}) has no line spread")
    rng = random.Random(seed)
    lines = carrier_lines(carrier)
    pts = sorted({p for l in lines for p in l.points()})
    pidx = {p: i for i, p in enumerate(pts)}
    lpts = [tuple(pidx[p] for p in l.points()) for l in lines]
    through: list[list[int]] = [[] for _ in pts]
    for li, lp in enumerate(lpts):
        for p in lp:
            through[p].append(li)
    target = len(pts) // (carrier.q + 1)
    for _ in range(max_restarts):
        covered = [False] * len(pts)
        chosen: list[int] = []
        budget = [20000]

        def dfs() -> bool:
            if len(chosen) == target:
                return True
            budget[0] -= 1
            if budget[0] < 0:
                return False
            best, opts = None, None
            for p in range(len(pts)):
                if covered[p]:
                    continue
                o = [l for l in through[p] if not any(covered[x] for x in lpts[l])]
                if best is None or len(o) < len(opts):
                    best, opts = p, o
                    if not o:
                        return False
            rng.shuffle(opts)
            for l in opts:
                for x in lpts[l]:
                    covered[x] = True
                chosen.append(l)
                if dfs():
                    return True
                chosen.pop()
                for x in lpts[l]:
                    covered[x] = False
            return False

        if dfs():
            return LineSpread(carrier, tuple(sorted(lines[i] for i in chosen)))
    raise RuntimeError("no spread found within the restart budget")


# -- files -----------------------------------------------------------

def read_lines(path, q: int) -> list[Subspace]:
    out = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                out.append(parse_subspace(line, q))
    return out


def write_lines(path, lines: Sequence[Subspace], header: str = "") -> None:
    with open(path, "w") as fh:
        for h in header.splitlines():
            fh.write(f"# {h}\n")
        for l in lines:
            fh.write(format_subspace(l) + "\n")


def spread_report(spread: LineSpread) -> dict:
    ok = is_spread(spread.lines, spread.carrier)
    rep = {"carrier": format_subspace(spread.carrier), "size": len(spread.lines), "is_spread": ok,
           "is_geometric": None, "is_linear": None, "span_dim": None}
    if ok:
        rep["is_geometric"] = is_geometric(spread)
        rep["is_linear"], rep["span_dim"] = is_linear(spread)
    return rep
