"""Linear complexes of h-subspaces of PG(n, q) and their null polarities.

A complex is stored only through its covector, a nonzero alternating
(h+1)-form c; X is a member iff <c, pluecker(X)> = 0.  Member sets are
always recomputed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .exterior import (
    AlternatingForm,
    contraction_matrix,
    evaluate,
    format_form,
    index_tuples,
    pair,
    parse_form,
    pluecker,
    pluecker_matrix,
)
from .gf import Field, field_create
from .projspace import (
    GeometryError,
    Subspace,
    basis_array,
    hyperplane,
    interval_coords,
    lift,
    pencil_table,
    span,
    subspace_index,
    subspaces,
    whole,
)


class Marker(enum.Enum):
    SINGULAR = "SINGULAR"
    TOTAL = "TOTAL"
    ALL = "ALL"

    def __repr__(self):
        return self.value


SINGULAR = Marker.SINGULAR
TOTAL = Marker.TOTAL
ALL = Marker.ALL


class ComplexError(ValueError):
    pass


class InvalidPolarity(ComplexError):
    pass


class InconsistentComplex(RuntimeError):
    """A linear solve that must have a one-dimensional answer did not."""


@dataclass(frozen=True)
class LinearComplex:
    n: int
    q: int
    h: int
    form: AlternatingForm

    def __post_init__(self):
        if not 0 <= self.h <= self.n - 1:
            raise ComplexError(f"h={self.h} out of range for PG({self.n},{self.q})")
        if self.form.degree != self.h + 1 or self.form.n != self.n or self.form.q != self.q:
            raise ComplexError("covector does not match (n, q, h)")
        if self.form.is_zero:
            raise ComplexError("the zero covector defines no complex")
        object.__setattr__(self, "form", self.form.normalized())

    @classmethod
    def from_literal(cls, text: str, n: int, q: int, h: int | None = None) -> "LinearComplex":
        form = parse_form(text, n, q)
        if h is not None and form.degree != h + 1:
            raise ComplexError(f"form literal has degree {form.degree}, expected {h + 1}")
        return cls(n, q, form.degree - 1, form)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[int], n: int, q: int, h: int) -> "LinearComplex":
        return cls(n, q, h, AlternatingForm(n, q, h + 1, tuple(int(a) for a in coeffs)))

    @property
    def field(self) -> Field:
        return field_create(self.q)

    @property
    def literal(self) -> str:
        return format_form(self.form)

    @cached_property
    def covector(self) -> np.ndarray:
        return np.asarray(self.form.coeffs, dtype=np.int64)

    @cached_property
    def contraction(self) -> np.ndarray:
        return contraction_matrix(self.form)

    def contains(self, x: Subspace) -> bool:
        if x.dim != self.h or x.n != self.n or x.q != self.q:
            raise GeometryError(f"expected an {self.h}-subspace of PG({self.n},{self.q})")
        return pair(self.form, pluecker(x)) == 0

    __contains__ = contains

    def member_mask(self) -> np.ndarray:
        """Boolean mask over ``subspaces(n, q, h)``."""
        return self.field.matmul(pluecker_matrix(self.n, self.q, self.h), self.covector) == 0

    def members(self) -> list[Subspace]:
        allx = subspaces(self.n, self.q, self.h)
        return [allx[i] for i in np.flatnonzero(self.member_mask())]

    def polar_covectors(self) -> np.ndarray:
        """Normalised contraction covector for every (h-1)-subspace (zero rows = singular)."""
        self._need_polar()
        v = self.field.matmul(pluecker_matrix(self.n, self.q, self.h - 1), self.contraction)
        return linalg.batch_normalize(v, self.field)

    def _need_polar(self):
        if not 1 <= self.h <= self.n - 1:
            raise ComplexError("polarity operations need 1 <= h <= n-1")


def complex_from_members(members: Iterable[Subspace], n: int, q: int, h: int) -> LinearComplex:
    """Recover the covector of a complex from its member set by a linear solve."""
    members = list(members)
    f = field_create(q)
    idx = subspace_index(n, q, h)
    pm = pluecker_matrix(n, q, h)
    rows = [pm[idx[x]].tolist() for x in members]
    ker = linalg.nullspace(rows, pm.shape[1], f) if rows else None
    if ker is None or len(ker) != 1:
        raise InconsistentComplex(
            f"member set determines a {0 if ker is None else len(ker)}-dimensional covector space")
    k = LinearComplex.from_coeffs(ker[0], n, q, h)
    if set(k.members()) != set(members):
        raise InconsistentComplex("recovered covector does not reproduce the member set")
    return k


# -- primes ------------------------------------------------------------

def _mask_of(s: Iterable[Subspace], n: int, q: int, h: int) -> np.ndarray:
    idx = subspace_index(n, q, h)
    mask = np.zeros(len(idx), dtype=bool)
    for x in s:
        mask[idx[x]] = True
    return mask


def prime_violation(mask: np.ndarray, n: int, q: int, h: int) -> int | None:
    """Index of the first pencil violating the prime dichotomy, -1 if not proper, None if prime."""
    if mask.all():
        return -1
    pt = pencil_table(n, q, h)
    cnt = mask[pt.members].sum(axis=1)
    bad = np.flatnonzero((cnt != 1) & (cnt != q + 1))
    return int(bad[0]) if len(bad) else None


def is_prime(s: Iterable[Subspace], n: int, q: int, h: int | None = None) -> bool:
    """Proper subset meeting every pencil in 1 or all q+1 members."""
    s = list(s)
    if h is None:
        if not s:
            raise ComplexError("cannot infer h from an empty set; pass h explicitly")
        h = s[0].dim
    return prime_violation(_mask_of(s, n, q, h), n, q, h) is None


def is_prime_mask(mask: np.ndarray, n: int, q: int, h: int) -> bool:
    return prime_violation(np.asarray(mask, dtype=bool), n, q, h) is None


# -- restriction to intervals -------------------------------------------

def restrict(k: LinearComplex, u: Subspace, w: Subspace) -> LinearComplex | Marker:
    """K(U, W) in the coordinates of ``interval_coords(U, W)``, or ALL."""
    if not w.contains(u):
        raise GeometryError("U is not contained in W")
    if u.dim > k.h - 1 or w.dim < k.h + 1:
        raise GeometryError("need dim U <= h-1 and dim W >= h+1")
    ic = interval_coords(u, w)
    hh = k.h - 1 - u.dim
    comp = ic.complement
    coeffs = []
    for s in index_tuples(ic.dim, hh + 1):
        coeffs.append(evaluate(k.form, list(u.rows) + [comp[i] for i in s]))
    if not any(coeffs):
        return ALL
    return LinearComplex.from_coeffs(coeffs, ic.dim, k.q, hh)


# -- polar hyperplanes and the null polarity -----------------------------

def polar_hyperplane(k: LinearComplex, u: Subspace) -> Subspace | Marker:
    k._need_polar()
    if u.dim != k.h - 1:
        raise GeometryError(f"expected an {k.h - 1}-subspace")
    from .exterior import contract
    v = contract(k.form, pluecker(u))
    if not any(v):
        return SINGULAR
    return hyperplane(v, k.q)


def star(u: Subspace, h: int) -> list[Subspace]:
    """All h-subspaces through the (h-1)-subspace u."""
    ic = interval_coords(u, whole(u.n, u.q))
    return [ic.from_coords(p) for p in subspaces(ic.dim, u.q, 0)]


def polar_hyperplane_by_union(k: LinearComplex, u: Subspace) -> Subspace | Marker:
    """Contraction-free oracle: the join of all members of K through u."""
    st = star(u, k.h)
    mem = [x for x in st if k.contains(x)]
    if len(mem) == len(st):
        return SINGULAR
    out = mem[0]
    for x in mem[1:]:
        out = out.join(x)
    return out


def union_polar_table(k: LinearComplex) -> list[Subspace | Marker]:
    """polar_hyperplane_by_union for every (h-1)-subspace, from index tables."""
    k._need_polar()
    mask = k.member_mask()
    bases = basis_array(k.n, k.q, k.h)
    out = []
    for st in pencil_table(k.n, k.q, k.h).stars:
        mem = [i for i in st if mask[i]]
        if len(mem) == len(st):
            out.append(SINGULAR)
            continue
        rows = bases[mem].reshape(-1, k.n + 1).tolist()
        out.append(span(rows, k.q, k.n))
    return out


@dataclass
class PolarMap:
    """A total table from k-subspaces to hyperplanes or SINGULAR.

    ``covectors[i]`` is the normalised hyperplane covector of
    ``subspaces(n, q, k)[i]``; a zero row marks SINGULAR.
    """

    n: int
    q: int
    k: int
    covectors: np.ndarray

    @classmethod
    def from_table(cls, table: dict[Subspace, Subspace | Marker], n: int, q: int, k: int) -> "PolarMap":
        from .projspace import hyperplane_covector
        allu = subspaces(n, q, k)
        cov = np.zeros((len(allu), n + 1), dtype=np.int64)
        for i, u in enumerate(allu):
            if u not in table:
                raise InvalidPolarity(f"table has no entry for {u}")
            val = table[u]
            if val is not SINGULAR:
                cov[i] = hyperplane_covector(val)
        return cls(n, q, k, cov)

    def __getitem__(self, u: Subspace) -> Subspace | Marker:
        v = self.covectors[subspace_index(self.n, self.q, self.k)[u]]
        return SINGULAR if not v.any() else hyperplane(v.tolist(), self.q)

    def table(self) -> dict[Subspace, Subspace | Marker]:
        return {u: self[u] for u in subspaces(self.n, self.q, self.k)}

    @property
    def domain_mask(self) -> np.ndarray:
        return self.covectors.any(axis=1)

    def domain(self) -> list[Subspace]:
        allu = subspaces(self.n, self.q, self.k)
        return [allu[i] for i in np.flatnonzero(self.domain_mask)]

    def exceptional(self) -> list[Subspace]:
        allu = subspaces(self.n, self.q, self.k)
        return [allu[i] for i in np.flatnonzero(~self.domain_mask)]

    def incidence(self) -> np.ndarray:
        """Z[a, b] = U_a lies in chi(U_b) (always true for singular U_b)."""
        f = field_create(self.q)
        b = basis_array(self.n, self.q, self.k)
        prod = f.matmul(b, self.covectors.T)
        return ~(prod != 0).any(axis=1)


def up_polarity(k: LinearComplex) -> PolarMap:
    return PolarMap(k.n, k.q, k.h - 1, k.polar_covectors())


def linearity_violations(chi: PolarMap, limit: int = 10) -> list[str]:
    """Pencils of k-subspaces that satisfy none of the three linearity conditions."""
    f = field_create(chi.q)
    pt = pencil_table(chi.n, chi.q, chi.k)
    img = chi.covectors[pt.members]
    zero = ~img.any(axis=2)
    z = zero.sum(axis=1)
    rk = linalg.batch_rank(img, f)
    # condition (i): q+1 distinct images spanning a dual pencil
    distinct = np.ones(len(img), dtype=bool)
    for a, b in combinations(range(chi.q + 1), 2):
        distinct &= (img[:, a] != img[:, b]).any(axis=1)
    ok_i = (z == 0) & (rk == 2) & distinct
    # condition (ii): one exceptional member, all other images equal
    ok_ii = (z == 1) & (rk == 1)
    ok_iii = z == chi.q + 1
    bad = np.flatnonzero(~(ok_i | ok_ii | ok_iii))
    allu = subspaces(chi.n, chi.q, chi.k)
    out = []
    for p in bad[:limit]:
        mem = ", ".join(str(allu[m]) for m in pt.members[p])
        out.append(f"pencil [{mem}] has {int(z[p])} exceptional members and image rank {int(rk[p])}")
    return out


def null_violations(chi: PolarMap) -> list[Subspace]:
    z = chi.incidence()
    bad = chi.domain_mask & ~np.diag(z)
    allu = subspaces(chi.n, chi.q, chi.k)
    return [allu[i] for i in np.flatnonzero(bad)]


def reciprocity_violations(chi: PolarMap) -> list[tuple[Subspace, Subspace]]:
    """Collinear pairs with U1 in chi(U2) but U2 not in chi(U1)."""
    z = chi.incidence()
    pt = pencil_table(chi.n, chi.q, chi.k)
    allu = subspaces(chi.n, chi.q, chi.k)
    out = []
    for a, b in combinations(range(chi.q + 1), 2):
        u1, u2 = pt.members[:, a], pt.members[:, b]
        for x, y in ((u1, u2), (u2, u1)):
            bad = np.flatnonzero(z[x, y] & ~z[y, x])
            out.extend((allu[x[i]], allu[y[i]]) for i in bad)
    return out


def verify_null_polarity(chi: PolarMap) -> bool:
    """Non-empty domain, linear on every pencil, and U in chi(U) on the domain."""
    if not chi.domain_mask.any():
        return False
    if linearity_violations(chi, limit=1) or null_violations(chi):
        return False
    if reciprocity_violations(chi):
        raise AssertionError("null polarity fails reciprocity")
    return True


def from_polarity(chi: PolarMap) -> LinearComplex:
    """The unique complex K with up_polarity(K) == chi."""
    if not verify_null_polarity(chi):
        raise InvalidPolarity("map is not a linear null polarity with non-empty domain")
    h = chi.k + 1
    f = field_create(chi.q)
    pt = pencil_table(chi.n, chi.q, h)
    faces = pt.faces
    bases = basis_array(chi.n, chi.q, h)
    member = np.zeros(len(faces), dtype=bool)
    for x, fx in enumerate(faces):
        vals = f.matmul(bases[x], chi.covectors[fx].T)
        member[x] = bool((~(vals != 0).any(axis=0)).any())
    allx = subspaces(chi.n, chi.q, h)
    return complex_from_members([allx[i] for i in np.flatnonzero(member)], chi.n, chi.q, h)


def image_span_dim(k: LinearComplex) -> int:
    v = k.polar_covectors()
    return linalg.rank(v[v.any(axis=1)].tolist(), k.field) - 1


# -- singular locus ----------------------------------------------------

@dataclass(frozen=True)
class SingularLocus:
    subspaces: tuple[Subspace, ...]
    kernel: Subspace  # in PG(C(n+1, h) - 1, q)
    lower: int
    upper: int

    @property
    def dim(self) -> int:
        return self.kernel.dim


def singular_dim_bounds(n: int, h: int) -> tuple[int, int]:
    from math import comb
    return comb(n + 1, h) - (n + 2), comb(n + 1, h) - (h + 2)


def singular_locus(k: LinearComplex) -> SingularLocus:
    k._need_polar()
    m = k.contraction
    ker = linalg.nullspace(m.T.tolist(), m.shape[0], k.field)
    kernel = span(ker, k.q, m.shape[0] - 1)
    v = k.polar_covectors()
    allu = subspaces(k.n, k.q, k.h - 1)
    sing = tuple(allu[i] for i in np.flatnonzero(~v.any(axis=1)))
    lo, hi = singular_dim_bounds(k.n, k.h)
    return SingularLocus(sing, kernel, lo, hi)


def singular_pencil_closure_violations(k: LinearComplex) -> int:
    """Pencils of (h-1)-subspaces with 2..q singular members."""
    if k.h < 1:
        return 0
    sing = ~k.polar_covectors().any(axis=1)
    if k.h - 1 > k.n - 1:
        return 0
    pt = pencil_table(k.n, k.q, k.h - 1)
    cnt = sing[pt.members].sum(axis=1)
    return int(((cnt >= 2) & (cnt <= k.q)).sum())


# -- poles, total subspaces, products --------------------------------

def _pole_vector(k: LinearComplex, v: Subspace) -> list[int]:
    f = k.field
    m = k.h + 2
    rows = v.rows
    out_local = []
    for j in range(m):
        g = evaluate(k.form, [rows[i] for i in range(m) if i != j])
        out_local.append(g if j % 2 == 0 else f.neg(g))
    return linalg.lin_comb(out_local, rows, f)


def pole(k: LinearComplex, v: Subspace) -> Subspace | Marker:
    """The point P of V with: X in K iff P in X, for the h-subspaces X of V; or TOTAL."""
    if k.h > k.n - 2:
        raise ComplexError("poles need h <= n-2")
    if v.dim != k.h + 1:
        raise GeometryError(f"expected an {k.h + 1}-subspace")
    p = _pole_vector(k, v)
    if not any(p):
        return TOTAL
    return span([p], k.q)


def dual_star(v: Subspace, h: int) -> list[Subspace]:
    return [lift(x, v) for x in subspaces(v.dim, v.q, h)]


def pole_brute(k: LinearComplex, v: Subspace) -> Subspace | Marker:
    xs = dual_star(v, k.h)
    mem = [k.contains(x) for x in xs]
    if all(mem):
        return TOTAL
    for p in v.points():
        if all((x.contains_vector(p)) == m for x, m in zip(xs, mem)):
            return span([p], k.q)
    raise InconsistentComplex("no pole found")


def down_polarity(k: LinearComplex) -> list[Subspace | Marker]:
    """Pole (or TOTAL) of every (h+1)-subspace, in enumeration order."""
    return [pole(k, v) for v in subspaces(k.n, k.q, k.h + 1)]


def from_down_polarity(poles: Sequence[Subspace | Marker], n: int, q: int, h: int) -> LinearComplex:
    """Recover K from its dual polarity: X in K iff some V > X has X containing its pole."""
    allv = subspaces(n, q, h + 1)
    if len(poles) != len(allv):
        raise InvalidPolarity("table must cover every (h+1)-subspace")
    if all(p is TOTAL for p in poles):
        raise InvalidPolarity("empty domain")
    for v, p in zip(allv, poles):
        if p is not TOTAL and not v.contains(p):
            raise InvalidPolarity(f"pole {p} is not in {v}")
    pt = pencil_table(n, q, h)
    allx = subspaces(n, q, h)
    member = np.zeros(len(allx), dtype=bool)
    for vi, xs in enumerate(pt.dual_stars):
        p = poles[vi]
        for x in xs:
            if p is TOTAL or allx[x].contains(p):
                member[x] = True
    return complex_from_members([allx[i] for i in np.flatnonzero(member)], n, q, h)


def total_subspaces(k: LinearComplex) -> list[Subspace]:
    if k.h > k.n - 2:
        raise ComplexError("total subspaces need h <= n-2")
    return [v for v in subspaces(k.n, k.q, k.h + 1) if not any(_pole_vector(k, v))]


def is_total_hyperplane(k: LinearComplex, hyp: Subspace) -> bool:
    return all(k.contains(x) for x in dual_star(hyp, k.h))


def product_members(k: LinearComplex, hyp: Subspace) -> list[Subspace]:
    """K.H = {X : some member Y of K lies in X meet H}, over (h+1)-subspaces."""
    if hyp.dim != k.n - 1:
        raise GeometryError("expected a hyperplane")
    out = []
    for x in subspaces(k.n, k.q, k.h + 1):
        if hyp.contains(x):
            if any(k.contains(y) for y in dual_star(x, k.h)):
                out.append(x)
        elif k.contains(x.meet(hyp)):
            out.append(x)
    return out


def product(k: LinearComplex, hyp: Subspace) -> LinearComplex | Marker:
    if k.h > k.n - 2:
        raise ComplexError("the product needs h <= n-2")
    if is_total_hyperplane(k, hyp):
        return ALL
    mem = product_members(k, hyp)
    if not is_prime(mem, k.n, k.q, k.h + 1):
        raise InconsistentComplex("K.H is not a prime")
    return complex_from_members(mem, k.n, k.q, k.h + 1)
