"""Dense linear algebra over a :class:`~lincomplex.gf.Field`.

Scalar routines work on tuples/lists of element indices; the ``batch_*``
routines operate on stacks of integer matrices with numpy.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .gf import Field

Vector = tuple[int, ...]


def rref(rows: Sequence[Sequence[int]], field: Field) -> tuple[list[list[int]], list[int]]:
    """Reduced row-echelon form; returns (nonzero rows, pivot columns)."""
    add, mul, neg, inv = field.add_table, field.mul_table, field.neg_table, field.inv_table
    m = [list(r) for r in rows if any(r)]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        row = m[r]
        a = row[col]
        if a != 1:
            s = inv[a]
            row = m[r] = [mul[s][x] for x in row]
        for i in range(len(m)):
            if i != r:
                f = m[i][col]
                if f:
                    nf = mul[neg[f]]
                    mi = m[i]
                    m[i] = [add[x][nf[y]] for x, y in zip(mi, row)]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[int]], field: Field) -> int:
    return len(rref(rows, field)[0])


def nullspace(rows: Sequence[Sequence[int]], ncols: int, field: Field) -> list[list[int]]:
    """Basis of {x : row . x = 0 for every row}, in RREF."""
    red, piv = rref(rows, field)
    neg = field.neg_table
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for fc in free:
        x = [0] * ncols
        x[fc] = 1
        for row, pc in zip(red, piv):
            x[pc] = neg[row[fc]]
        basis.append(x)
    return rref(basis, field)[0]


def det(mat: Sequence[Sequence[int]], field: Field) -> int:
    add, mul, neg, inv = field.add_table, field.mul_table, field.neg_table, field.inv_table
    m = [list(r) for r in mat]
    size = len(m)
    d = 1
    for col in range(size):
        piv = next((i for i in range(col, size) if m[i][col]), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            d = neg[d]
        a = m[col][col]
        d = mul[d][a]
        s = inv[a]
        for i in range(col + 1, size):
            f = m[i][col]
            if f:
                nf = mul[neg[mul[f][s]]]
                m[i] = [add[x][nf[y]] for x, y in zip(m[i], m[col])]
    return d


def normalize(v: Sequence[int], field: Field) -> Vector:
    """Scale so the first nonzero entry is 1 (zero vector unchanged)."""
    for a in v:
        if a:
            if a == 1:
                return tuple(v)
            s = field.inv_table[a]
            mul = field.mul_table[s]
            return tuple(mul[x] for x in v)
    return tuple(v)


def dot(u: Sequence[int], v: Sequence[int], field: Field) -> int:
    add, mul = field.add_table, field.mul_table
    acc = 0
    for a, b in zip(u, v):
        if a and b:
            acc = add[acc][mul[a][b]]
    return acc


def lin_comb(coeffs: Sequence[int], vectors: Sequence[Sequence[int]], field: Field) -> list[int]:
    add, mul = field.add_table, field.mul_table
    out = [0] * len(vectors[0])
    for c, v in zip(coeffs, vectors):
        if c:
            mc = mul[c]
            out = [add[o][mc[x]] for o, x in zip(out, v)]
    return out


# -- numpy batches ------------------------------------------------------

def batch_normalize(a: np.ndarray, field: Field) -> np.ndarray:
    """Row-normalise the last axis so the first nonzero entry is 1."""
    a = np.asarray(a, dtype=np.int64)
    nz = a != 0
    first = np.argmax(nz, axis=-1)
    lead = np.take_along_axis(a, first[..., None], axis=-1)
    lead = np.where(nz.any(axis=-1, keepdims=True), lead, 1)
    return field.vmul(a, field.vinv(lead))


def batch_rank(a: np.ndarray, field: Field) -> np.ndarray:
    """Rank of every matrix in a stack of shape (..., r, c)."""
    a = np.array(a, dtype=np.int64)
    shape = a.shape[:-2]
    r, c = a.shape[-2:]
    a = a.reshape(-1, r, c)
    m = a.shape[0]
    used = np.zeros((m, r), dtype=bool)
    rk = np.zeros(m, dtype=np.int64)
    rows = np.arange(m)
    for col in range(c):
        cand = (a[:, :, col] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(cand, axis=1)
        sel = rows[has]
        prow = a[sel, piv[has]]
        prow = field.vmul(prow, field.vinv(prow[:, col])[:, None])
        sub = a[sel]
        factors = sub[:, :, col].copy()
        factors[np.arange(len(sel)), piv[has]] = 0
        sub = field.vsub(sub, field.vmul(factors[:, :, None], prow[:, None, :]))
        sub[np.arange(len(sel)), piv[has]] = prow
        a[sel] = sub
        used[sel, piv[has]] = True
        rk += has
    return rk.reshape(shape)
