"""Exterior powers of GF(q)^(n+1): Plücker coordinates, decomposability, contraction.

Basis k-vectors e_T and basis forms e*_T are indexed by strictly increasing
k-tuples T, listed in lexicographic order.  That order is part of every
serialised covector.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from . import linalg
from .gf import field_create
from .projspace import GeometryError, Subspace, span, subspaces


class NotDecomposable(ValueError):
    pass


class GradeMismatch(ValueError):
    pass


@lru_cache(maxsize=None)
def index_tuples(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(n + 1), k))


@lru_cache(maxsize=None)
def tuple_index(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {t: i for i, t in enumerate(index_tuples(n, k))}


@dataclass(frozen=True)
class MultiVector:
    """Grade-k element of the exterior algebra; ``coeffs`` follows :func:`index_tuples`."""

    n: int
    q: int
    grade: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(index_tuples(self.n, self.grade)):
            raise GradeMismatch("coefficient vector has the wrong length")

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def normalized(self) -> "MultiVector":
        return MultiVector(self.n, self.q, self.grade, linalg.normalize(self.coeffs, field_create(self.q)))

    def support(self) -> dict[tuple[int, ...], int]:
        return {t: c for t, c in zip(index_tuples(self.n, self.grade), self.coeffs) if c}


@dataclass(frozen=True)
class AlternatingForm:
    """Alternating m-linear form sum c_S e*_S; also the covector of a linear complex."""

    n: int
    q: int
    degree: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(index_tuples(self.n, self.degree)):
            raise GradeMismatch("coefficient vector has the wrong length")

    @classmethod
    def from_terms(cls, n: int, q: int, terms: dict[tuple[int, ...], int]) -> "AlternatingForm":
        degrees = {len(t) for t in terms}
        if len(degrees) != 1:
            raise GradeMismatch("terms of mixed degree")
        m = degrees.pop()
        idx = tuple_index(n, m)
        c = [0] * len(idx)
        add = field_create(q).add
        for t, a in terms.items():
            if tuple(sorted(t)) != tuple(t) or len(set(t)) != len(t):
                raise ValueError(f"index tuple {t} is not strictly increasing")
            if t not in idx:
                raise ValueError(f"index tuple {t} out of range for n={n}")
            c[idx[t]] = add(c[idx[t]], a)
        return cls(n, q, m, tuple(c))

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def normalized(self) -> "AlternatingForm":
        return AlternatingForm(self.n, self.q, self.degree, linalg.normalize(self.coeffs, field_create(self.q)))

    def scaled(self, s: int) -> "AlternatingForm":
        mul = field_create(self.q).mul_table[s]
        return AlternatingForm(self.n, self.q, self.degree, tuple(mul[a] for a in self.coeffs))

    def support(self) -> dict[tuple[int, ...], int]:
        return {t: c for t, c in zip(index_tuples(self.n, self.degree), self.coeffs) if c}

    def __call__(self, *vectors: Sequence[int]) -> int:
        return evaluate(self, vectors)

    def __str__(self) -> str:
        return format_form(self)


# -- wedge, Plücker ----------------------------------------------------

def wedge(vectors: Sequence[Sequence[int]], q: int) -> MultiVector:
    """v0 ^ v1 ^ ... : the coefficient at T is the minor on columns T."""
    vecs = [tuple(v) for v in vectors]
    if not vecs:
        raise GradeMismatch("wedge of no vectors")
    if len({len(v) for v in vecs}) != 1:
        raise GeometryError("vectors of different lengths")
    n, k = len(vecs[0]) - 1, len(vecs)
    f = field_create(q)
    coeffs = tuple(linalg.det([[v[c] for c in t] for v in vecs], f) for t in index_tuples(n, k))
    return MultiVector(n, q, k, coeffs)


def pluecker(x: Subspace) -> MultiVector:
    """Normalised Plücker coordinates of a nonempty subspace."""
    if x.is_empty:
        raise GeometryError("the empty subspace has no Plücker image")
    return wedge(x.rows, x.q).normalized()


@lru_cache(maxsize=64)
def pluecker_matrix(n: int, q: int, d: int) -> np.ndarray:
    """Plücker images of all d-subspaces (enumeration order), one per row."""
    return np.array([pluecker(x).coeffs for x in subspaces(n, q, d)], dtype=np.int64)


@lru_cache(maxsize=64)
def pluecker_lookup(n: int, q: int, d: int) -> dict[tuple[int, ...], int]:
    return {tuple(int(a) for a in row): i for i, row in enumerate(pluecker_matrix(n, q, d))}


def _vector_wedge_matrix(p: MultiVector) -> list[list[int]]:
    """Matrix of v -> v ^ p, one row per (grade+1)-tuple, one column per coordinate."""
    f = field_create(p.q)
    n, k = p.n, p.grade
    idx = tuple_index(n, k + 1)
    m = [[0] * (n + 1) for _ in idx]
    for t, c in p.support().items():
        for i in range(n + 1):
            if i in t:
                continue
            s = tuple(sorted(t + (i,)))
            before = sum(1 for x in t if x < i)
            m[idx[s]][i] = c if before % 2 == 0 else f.neg(c)
    return m


def unpluecker(p: MultiVector) -> Subspace:
    """Inverse of the Plücker map; raises NotDecomposable off the Grassmann variety."""
    if p.is_zero:
        raise GeometryError("zero multivector")
    f = field_create(p.q)
    sol = linalg.nullspace(_vector_wedge_matrix(p), p.n + 1, f)
    if len(sol) != p.grade:
        raise NotDecomposable(f"{p.coeffs} is not decomposable")
    return span(sol, p.q, p.n)


def is_decomposable(p: MultiVector) -> bool:
    try:
        unpluecker(p)
    except NotDecomposable:
        return False
    return True


def wedge_right(p: MultiVector, v: Sequence[int]) -> MultiVector:
    """p ^ v (the vector appended last)."""
    f = field_create(p.q)
    n, k = p.n, p.grade
    idx = tuple_index(n, k + 1)
    out = [0] * len(idx)
    for t, c in p.support().items():
        for i in range(n + 1):
            if i in t or not v[i]:
                continue
            s = tuple(sorted(t + (i,)))
            after = sum(1 for x in t if x > i)
            term = f.mul(c, v[i])
            if after % 2:
                term = f.neg(term)
            out[idx[s]] = f.add(out[idx[s]], term)
    return MultiVector(n, p.q, k + 1, tuple(out))


def pair(f: AlternatingForm, p: MultiVector) -> int:
    """<f, p> = sum over T of f_T p_T."""
    if f.degree != p.grade or f.n != p.n or f.q != p.q:
        raise GradeMismatch("form and multivector do not match")
    return linalg.dot(f.coeffs, p.coeffs, field_create(f.q))


def evaluate(f: AlternatingForm, vectors: Sequence[Sequence[int]]) -> int:
    if len(vectors) != f.degree:
        raise GradeMismatch(f"form of degree {f.degree} needs {f.degree} arguments")
    return pair(f, wedge(vectors, f.q))


@lru_cache(maxsize=None)
def _contraction_pattern(n: int, m: int, q: int):
    """(S index, T index, k, sign) for every S of size m and k in S, T = S - k."""
    f = field_create(q)
    tidx = tuple_index(n, m - 1)
    s_i, t_i, ks, sg = [], [], [], []
    for si, s in enumerate(index_tuples(n, m)):
        for k in s:
            t = tuple(x for x in s if x != k)
            after = sum(1 for x in s if x > k)
            s_i.append(si)
            t_i.append(tidx[t])
            ks.append(k)
            sg.append(1 if after % 2 == 0 else f.neg(1))
    return tuple(np.array(a, dtype=np.int64) for a in (s_i, t_i, ks, sg))


def contraction_matrix(f: AlternatingForm) -> np.ndarray:
    """Matrix M of p -> contract(f, p): shape (C(n+1, m-1), n+1), acting as ``p @ M``."""
    s_i, t_i, ks, sg = _contraction_pattern(f.n, f.degree, f.q)
    fld = field_create(f.q)
    m = np.zeros((len(index_tuples(f.n, f.degree - 1)), f.n + 1), dtype=np.int64)
    m[t_i, ks] = fld.vmul(sg, np.asarray(f.coeffs, dtype=np.int64)[s_i])
    return m


def contract(f: AlternatingForm, p: MultiVector) -> tuple[int, ...]:
    """The covector w -> f(p, w); e*_S by e_T gives (-1)^#{s in S: s > k} e*_k for S - T = {k}."""
    if p.grade != f.degree - 1 or p.n != f.n or p.q != f.q:
        raise GradeMismatch(f"cannot contract a degree-{f.degree} form by a grade-{p.grade} multivector")
    fld = field_create(f.q)
    out = fld.matmul(np.asarray(p.coeffs, dtype=np.int64), contraction_matrix(f))
    return tuple(int(a) for a in out)


# -- form literals -----------------------------------------------------

_TERM = re.compile(r"^(?:(\d+)\*)?((?:\d|\(\d+\))+)$")


def _format_index(i: int) -> str:
    return str(i) if i < 10 else f"({i})"


def format_form(f: AlternatingForm) -> str:
    """Literal such as ``012+034`` or ``2*012+134``; ``0`` for the zero form."""
    terms = []
    for t, c in f.support().items():
        body = "".join(_format_index(i) for i in t)
        terms.append(body if c == 1 else f"{c}*{body}")
    return "+".join(terms) if terms else "0"


def parse_form(text: str, n: int, q: int) -> AlternatingForm:
    text = text.replace(" ", "")
    if not text:
        raise ValueError("empty form literal")
    terms: dict[tuple[int, ...], int] = {}
    add = field_create(q).add
    for part in text.split("+"):
        m = _TERM.match(part)
        if not m:
            raise ValueError(f"malformed form term {part!r}")
        c = int(m.group(1)) if m.group(1) is not None else 1
        if not 0 <= c < q:
            raise ValueError(f"scalar {c} is not an element of GF({q})")
        t = tuple(int(a) for a in re.findall(r"\((\d+)\)|(\d)", m.group(2)) for a in [a[0] or a[1]])
        terms[t] = add(terms.get(t, 0), c)
    return AlternatingForm.from_terms(n, q, terms)
