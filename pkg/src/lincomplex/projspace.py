"""Subspaces of PG(n, q) in canonical reduced row-echelon form."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property, lru_cache
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import linalg
from .gf import Field, field_create

DIGITS = "0123456789abcdef"


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Subspace:
    """A subspace of PG(n, q); ``rows`` is its RREF basis (empty for d = -1)."""

    rows: tuple[tuple[int, ...], ...]
    n: int = dc_field(compare=False)
    q: int = dc_field(compare=False)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.q == other.q and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.q, self.rows))

    @property
    def field(self) -> Field:
        return field_create(self.q)

    @property
    def dim(self) -> int:
        return len(self.rows) - 1

    @property
    def is_empty(self) -> bool:
        return not self.rows

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, a in enumerate(r) if a) for r in self.rows)

    def join(self, other: "Subspace") -> "Subspace":
        _same_ambient(self, other)
        return _from_rows(self.rows + other.rows, self.n, self.q)

    def meet(self, other: "Subspace") -> "Subspace":
        _same_ambient(self, other)
        eqs = self.equations() + other.equations()
        return _from_rows(linalg.nullspace(eqs, self.n + 1, self.field), self.n, self.q)

    def equations(self) -> list[list[int]]:
        """Basis of the annihilator: covectors vanishing on the subspace."""
        if not self.rows:
            return [[int(i == j) for j in range(self.n + 1)] for i in range(self.n + 1)]
        return linalg.nullspace(self.rows, self.n + 1, self.field)

    def contains_vector(self, v: Sequence[int]) -> bool:
        if not any(v):
            return True
        f = self.field
        add, mul, neg = f.add_table, f.mul_table, f.neg_table
        w = list(v)
        for row, pc in zip(self.rows, self.pivots):
            c = w[pc]
            if c:
                nc = mul[neg[c]]
                w = [add[x][nc[y]] for x, y in zip(w, row)]
        return not any(w)

    def __lt__(self, other: "Subspace") -> bool:
        return self.rows < other.rows

    def contains(self, other: "Subspace") -> bool:
        _same_ambient(self, other)
        return all(self.contains_vector(r) for r in other.rows)

    def points(self) -> list[tuple[int, ...]]:
        """Normalised coordinate vectors of all points."""
        f = self.field
        out = []
        for c in product(range(self.q), repeat=len(self.rows)):
            if any(c) and c[next(i for i, a in enumerate(c) if a)] == 1:
                out.append(tuple(linalg.lin_comb(c, self.rows, f)))
        return sorted(out)

    def __str__(self) -> str:
        return format_subspace(self)

    def __repr__(self) -> str:
        return f"Subspace({format_subspace(self)!r}, n={self.n}, q={self.q})"


def _same_ambient(a: Subspace, b: Subspace) -> None:
    if a.n != b.n or a.q != b.q:
        raise GeometryError(f"ambient mismatch: PG({a.n},{a.q}) vs PG({b.n},{b.q})")


def _from_rows(rows, n: int, q: int) -> Subspace:
    red, _ = linalg.rref(rows, field_create(q))
    return Subspace(tuple(tuple(r) for r in red), n, q)


def span(vectors: Iterable[Sequence[int]], q: int, n: int | None = None) -> Subspace:
    """Subspace spanned by coordinate vectors; zero vectors are dropped."""
    vecs = [tuple(v) for v in vectors]
    if vecs:
        lengths = {len(v) for v in vecs}
        if len(lengths) > 1:
            raise GeometryError(f"mixed vector lengths {sorted(lengths)}")
        if n is not None and lengths != {n + 1}:
            raise GeometryError(f"vectors must have length {n + 1}")
        n = lengths.pop() - 1
    elif n is None:
        raise GeometryError("the ambient dimension is required for an empty span")
    if any(not 0 <= a < q for v in vecs for a in v):
        raise GeometryError(f"coordinates outside GF({q})")
    return _from_rows(vecs, n, q)


def empty(n: int, q: int) -> Subspace:
    return Subspace((), n, q)


def whole(n: int, q: int) -> Subspace:
    return Subspace(tuple(tuple(int(i == j) for j in range(n + 1)) for i in range(n + 1)), n, q)


def point(v: Sequence[int], q: int) -> Subspace:
    return span([v], q)


def join(u: Subspace, w: Subspace) -> Subspace:
    return u.join(w)


def meet(u: Subspace, w: Subspace) -> Subspace:
    return u.meet(w)


def gaussian_binomial(a: int, b: int, q: int) -> int:
    """Number of b-dimensional subspaces of GF(q)^a."""
    if b < 0 or b > a:
        return 0
    num = den = 1
    for i in range(b):
        num *= q ** (a - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def count_subspaces(n: int, q: int, d: int) -> int:
    return gaussian_binomial(n + 1, d + 1, q)


def _rref_matrices(n: int, q: int, d: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    k = d + 1
    for piv in combinations(range(n + 1), k):
        pset = set(piv)
        free = [(r, c) for r, p in enumerate(piv) for c in range(p + 1, n + 1) if c not in pset]
        for vals in product(range(q), repeat=len(free)):
            m = [[0] * (n + 1) for _ in range(k)]
            for r, p in enumerate(piv):
                m[r][p] = 1
            for (r, c), v in zip(free, vals):
                m[r][c] = v
            yield tuple(tuple(r) for r in m)


@lru_cache(maxsize=64)
def subspaces(n: int, q: int, d: int) -> tuple[Subspace, ...]:
    """All d-subspaces of PG(n, q), sorted lexicographically by canonical matrix."""
    field_create(q)
    if not -1 <= d <= n:
        raise GeometryError(f"dimension {d} out of range for PG({n},{q})")
    return tuple(Subspace(m, n, q) for m in sorted(_rref_matrices(n, q, d)))


def enumerate_subspaces(n: int, q: int, d: int, start: int = 0) -> Iterator[Subspace]:
    """Stream every d-subspace exactly once; restartable from an index."""
    all_ = subspaces(n, q, d)
    yield from all_[start:]


@lru_cache(maxsize=64)
def subspace_index(n: int, q: int, d: int) -> dict[Subspace, int]:
    return {s: i for i, s in enumerate(subspaces(n, q, d))}


@lru_cache(maxsize=64)
def basis_array(n: int, q: int, d: int) -> np.ndarray:
    """RREF bases of all d-subspaces, shape (count, d+1, n+1)."""
    return np.array([s.rows for s in subspaces(n, q, d)], dtype=np.int64).reshape(-1, d + 1, n + 1)


def hyperplane_covector(h: Subspace) -> tuple[int, ...]:
    """Normalised coefficient vector a with H = {x : a.x = 0}."""
    if h.dim != h.n - 1:
        raise GeometryError("not a hyperplane")
    return tuple(h.equations()[0])


def hyperplane(covector: Sequence[int], q: int) -> Subspace:
    if not any(covector):
        raise GeometryError("zero covector defines no hyperplane")
    n = len(covector) - 1
    return _from_rows(linalg.nullspace([list(covector)], n + 1, field_create(q)), n, q)


# -- pencils and intervals ---------------------------------------------

@dataclass(frozen=True)
class Pencil:
    vertex: Subspace
    carrier: Subspace
    members: tuple[Subspace, ...]


def pencil(u: Subspace, w: Subspace) -> Pencil:
    """The q+1 subspaces X with u < X < w, where dim w = dim u + 2."""
    _same_ambient(u, w)
    if not w.contains(u):
        raise GeometryError("vertex is not contained in the carrier")
    if w.dim != u.dim + 2:
        raise GeometryError("carrier must have dimension vertex + 2")
    ic = IntervalCoords(u, w)
    members = tuple(sorted(ic.from_coords(p) for p in subspaces(1, u.q, 0)))
    return Pencil(u, w, members)


class IntervalCoords:
    """Coordinates on the interval [U, W] as the projective space PG(dim W - dim U - 1, q).

    A complement of U in W is fixed by taking, in order, those RREF rows of W
    that are independent of U and of the rows already taken.
    """

    def __init__(self, u: Subspace, w: Subspace):
        _same_ambient(u, w)
        if not w.contains(u):
            raise GeometryError("U is not contained in W")
        self.u, self.w = u, w
        f = u.field
        comp: list[tuple[int, ...]] = []
        cur = list(u.rows)
        for r in w.rows:
            if linalg.rank(cur + [r], f) > len(cur):
                cur.append(r)
                comp.append(r)
        self.complement = tuple(comp)
        self.dim = w.dim - u.dim - 1
        # coordinates w.r.t. [U rows; complement rows] via RREF of [B | I]
        basis = list(u.rows) + comp
        size = len(basis)
        aug = [list(b) + [int(i == j) for j in range(size)] for i, b in enumerate(basis)]
        red, piv = linalg.rref(aug, f)
        self._red = red
        self._piv = piv
        self._nu = len(u.rows)
        self._ncol = u.n + 1

    def vector_coords(self, v: Sequence[int]) -> list[int]:
        """Complement coordinates of a vector of W (its U-part dropped)."""
        f = self.u.field
        coeff_r = [v[p] for p in self._piv]
        t_rows = [row[self._ncol:] for row in self._red]
        full = linalg.lin_comb(coeff_r, t_rows, f) if t_rows else []
        return full[self._nu:]

    def to_coords(self, x: Subspace) -> Subspace:
        if not (x.contains(self.u) and self.w.contains(x)):
            raise GeometryError("subspace is not in the interval")
        vecs = [self.vector_coords(r) for r in x.rows]
        return span(vecs, x.q, self.dim)

    def from_coords(self, y: Subspace) -> Subspace:
        if y.n != self.dim:
            raise GeometryError("coordinates live in the wrong projective space")
        f = self.u.field
        vecs = [linalg.lin_comb(r, self.complement, f) for r in y.rows]
        return span(list(self.u.rows) + vecs, self.u.q, self.u.n)


def interval_coords(u: Subspace, w: Subspace) -> IntervalCoords:
    return IntervalCoords(u, w)


def lift(local: Subspace, carrier: Subspace) -> Subspace:
    """Image of a subspace of PG(dim carrier, q) under the carrier's RREF basis."""
    f = carrier.field
    rows = [linalg.lin_comb(r, carrier.rows, f) for r in local.rows]
    return _from_rows(rows, carrier.n, carrier.q)


@dataclass(frozen=True)
class PencilTable:
    """Every pencil of h-subspaces of PG(n, q) as index arrays.

    ``vertex`` indexes ``subspaces(n, q, h-1)``, ``carrier`` indexes
    ``subspaces(n, q, h+1)``, ``members`` (shape (P, q+1)) indexes
    ``subspaces(n, q, h)``.
    """

    n: int
    q: int
    h: int
    vertex: np.ndarray
    carrier: np.ndarray
    members: np.ndarray

    @cached_property
    def faces(self) -> list[list[int]]:
        """For each h-subspace, the indices of its (h-1)-subspaces."""
        out: list[set[int]] = [set() for _ in subspaces(self.n, self.q, self.h)]
        for v, mem in zip(self.vertex, self.members):
            for x in mem:
                out[x].add(int(v))
        return [sorted(s) for s in out]

    @cached_property
    def stars(self) -> list[list[int]]:
        """For each (h-1)-subspace, the indices of the h-subspaces through it."""
        out: list[set[int]] = [set() for _ in subspaces(self.n, self.q, self.h - 1)]
        for v, mem in zip(self.vertex, self.members):
            out[v].update(int(x) for x in mem)
        return [sorted(s) for s in out]

    @cached_property
    def dual_stars(self) -> list[list[int]]:
        """For each (h+1)-subspace, the indices of the h-subspaces inside it."""
        out: list[set[int]] = [set() for _ in subspaces(self.n, self.q, self.h + 1)]
        for c, mem in zip(self.carrier, self.members):
            out[c].update(int(x) for x in mem)
        return [sorted(s) for s in out]


@lru_cache(maxsize=32)
def pencil_table(n: int, q: int, h: int) -> PencilTable:
    if not 0 <= h <= n - 1:
        raise GeometryError(f"no pencils of {h}-subspaces in PG({n},{q})")
    loc_u = subspaces(h + 1, q, h - 1)
    loc_x = subspaces(h + 1, q, h)
    local = []
    for i, u in enumerate(loc_u):
        local.append((i, [j for j, x in enumerate(loc_x) if x.contains(u)]))
    idx_u = subspace_index(n, q, h - 1)
    idx_x = subspace_index(n, q, h)
    vs, cs, ms = [], [], []
    for ci, w in enumerate(subspaces(n, q, h + 1)):
        gu = [idx_u[lift(u, w)] for u in loc_u]
        gx = [idx_x[lift(x, w)] for x in loc_x]
        for i, mem in local:
            vs.append(gu[i])
            cs.append(ci)
            ms.append([gx[j] for j in mem])
    return PencilTable(n, q, h, np.array(vs), np.array(cs), np.array(ms).reshape(-1, q + 1))


# -- textual syntax -----------------------------------------------------

def format_vector(v: Sequence[int]) -> str:
    return "".join(DIGITS[a] for a in v)


def format_subspace(x: Subspace) -> str:
    """Semicolon-separated RREF rows, e.g. ``1000;0100``; ``-`` for the empty subspace."""
    if not x.rows:
        return "-"
    return ";".join(format_vector(r) for r in x.rows)


def parse_vector(text: str, q: int) -> tuple[int, ...]:
    text = text.strip().lower()
    try:
        v = tuple(DIGITS.index(ch) for ch in text)
    except ValueError:
        raise GeometryError(f"malformed coordinate vector {text!r}") from None
    if not v or any(a >= q for a in v):
        raise GeometryError(f"malformed coordinate vector {text!r} over GF({q})")
    return v


def parse_subspace(text: str, q: int, n: int | None = None) -> Subspace:
    text = text.strip()
    if text in ("-", ""):
        if n is None:
            raise GeometryError("the empty subspace needs an explicit ambient dimension")
        return empty(n, q)
    return span([parse_vector(t, q) for t in text.split(";")], q, n)
