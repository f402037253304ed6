"""Enumeration and sampling of alternating trilinear forms, and the searches
for complexes of planes without singular lines.

A line <u, v> is singular for f iff v lies in the radical of the alternating
matrix A_u = f(u, ., .).  Since u is always in that radical, a point u lies
on a singular line iff rank(A_u) <= n - 1, and on exactly one iff
rank(A_u) == n - 1.  The batched routines below test that criterion for many
forms and points at once.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from functools import lru_cache
from math import comb

import numpy as np

from . import __version__, linalg
from .complexes import LinearComplex, singular_locus
from .exterior import AlternatingForm, _contraction_pattern, format_form, index_tuples, pluecker_matrix
from .gf import field_create
from .projspace import basis_array, subspaces
from .spreads import (
    LineSpread,
    is_geometric,
    is_linear,
    is_spread,
    pluecker_ambient_dim,
)

log = logging.getLogger(__name__)

DEFAULT_CAP = 2 ** 24
BLOCK = 64  # points per stage of the early-exit singular-line test


class BudgetExceeded(ValueError):
    pass


@dataclass
class SearchReport:
    n: int
    q: int
    mode: str
    seed: int | None
    budget: int | None
    workers: int = 1
    forms_tested: int = 0
    forms_without_singular_line: int = 0
    forms_whose_singular_lines_form_a_spread: int | None = None
    elapsed: float = 0.0
    witnesses: list[str] = dc_field(default_factory=list)
    version: str = __version__
    note: str = ""

    def merge(self, other: "SearchReport") -> "SearchReport":
        spreads = None
        if self.forms_whose_singular_lines_form_a_spread is not None or \
                other.forms_whose_singular_lines_form_a_spread is not None:
            spreads = (self.forms_whose_singular_lines_form_a_spread or 0) + \
                (other.forms_whose_singular_lines_form_a_spread or 0)
        return SearchReport(
            self.n, self.q, self.mode, self.seed, self.budget, self.workers,
            self.forms_tested + other.forms_tested,
            self.forms_without_singular_line + other.forms_without_singular_line,
            spreads, max(self.elapsed, other.elapsed), self.witnesses + other.witnesses,
            self.version, self.note or other.note)

    def to_dict(self) -> dict:
        return asdict(self)


# -- enumeration -------------------------------------------------------

def form_count(n: int, q: int) -> int:
    """Number of projective points of the space of alternating trilinear forms on GF(q)^(n+1)."""
    return (q ** comb(n + 1, 3) - 1) // (q - 1)


def form_at(n: int, q: int, index: int) -> AlternatingForm:
    """The index-th normalised form; coefficient 0 is most significant.

    Normalised vectors (first nonzero entry 1) are ordered by their value as
    base-q numerals, so for q = 2 form i has the binary digits of i + 1.
    """
    big_n = comb(n + 1, 3)
    if not 0 <= index < form_count(n, q):
        raise IndexError(index)
    m, offset = 0, 0
    while offset + q ** m <= index:
        offset += q ** m
        m += 1
    tail = index - offset
    digits = [0] * big_n
    digits[big_n - 1 - m] = 1
    for pos in range(big_n - 1, big_n - 1 - m, -1):
        digits[pos] = tail % q
        tail //= q
    return AlternatingForm(n, q, 3, tuple(digits))


def form_index(f: AlternatingForm) -> int:
    f = f.normalized()
    q, c = f.q, f.coeffs
    lead = next(i for i, a in enumerate(c) if a)
    m = len(c) - 1 - lead
    tail = 0
    for a in c[lead + 1:]:
        tail = tail * q + a
    return (q ** m - 1) // (q - 1) + tail


def enumerate_forms(n: int, q: int, start: int = 0, stop: int | None = None):
    """One representative per projective point of the form space, by index."""
    if n < 3:
        raise ValueError("trilinear forms need n >= 3")
    stop = form_count(n, q) if stop is None else stop
    for i in range(start, stop):
        yield form_at(n, q, i)


def forms_block(n: int, q: int, start: int, stop: int) -> np.ndarray:
    """Coefficient arrays of forms start..stop-1 (vectorised :func:`form_at`)."""
    big_n = comb(n + 1, 3)
    idx = np.arange(start, stop, dtype=np.int64)
    if q == 2:
        vals = idx + 1
        shifts = np.arange(big_n - 1, -1, -1, dtype=np.int64)
        return (vals[:, None] >> shifts[None, :]) & 1
    out = np.zeros((len(idx), big_n), dtype=np.int64)
    offsets = np.cumsum([0] + [q ** m for m in range(big_n)])
    m = np.searchsorted(offsets, idx, side="right") - 1
    tail = idx - offsets[m]
    out[np.arange(len(idx)), big_n - 1 - m] = 1
    for pos in range(big_n - 1, -1, -1):
        width = big_n - 1 - pos
        sel = m > width
        out[sel, pos] = tail[sel] % q
        tail[sel] //= q
    return out


def sample_forms(n: int, q: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform nonzero coefficient vectors, normalised to first nonzero entry 1."""
    big_n = comb(n + 1, 3)
    out = rng.integers(0, q, size=(count, big_n), dtype=np.int64)
    zero = ~out.any(axis=1)
    while zero.any():
        out[zero] = rng.integers(0, q, size=(int(zero.sum()), big_n), dtype=np.int64)
        zero = ~out.any(axis=1)
    return linalg.batch_normalize(out, field_create(q))


# -- singular lines ----------------------------------------------------

@lru_cache(maxsize=None)
def _tensor_pattern(n: int, q: int):
    f = field_create(q)
    s_idx, pos, sgn = [], [], []
    for si, (i, j, k) in enumerate(index_tuples(n, 3)):
        for perm, even in (((i, j, k), 1), ((j, k, i), 1), ((k, i, j), 1),
                           ((j, i, k), 0), ((i, k, j), 0), ((k, j, i), 0)):
            s_idx.append(si)
            pos.append(np.ravel_multi_index(perm, (n + 1,) * 3))
            sgn.append(1 if even else f.neg(1))
    return np.array(s_idx), np.array(pos), np.array(sgn)


def full_tensor(coeffs: np.ndarray, n: int, q: int) -> np.ndarray:
    """Alternating tensors T[b, i, j, k] = f_b(e_i, e_j, e_k), shape (B, m, m, m)."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.int64))
    f = field_create(q)
    s_idx, pos, sgn = _tensor_pattern(n, q)
    m = n + 1
    t = np.zeros((len(coeffs), m ** 3), dtype=np.int64)
    t[:, pos] = f.vmul(coeffs[:, s_idx], sgn[None, :])
    return t.reshape(-1, m, m, m)


@lru_cache(maxsize=None)
def point_vectors(n: int, q: int) -> np.ndarray:
    return basis_array(n, q, 0)[:, 0, :]


def point_matrices(tensor: np.ndarray, points: np.ndarray, q: int) -> np.ndarray:
    """A[b, u] = f_b(u, ., .) for every form b and point u: shape (B, U, m, m)."""
    f = field_create(q)
    if f.is_prime:
        a = np.tensordot(points, tensor, axes=([1], [1])) % q
        return a.transpose(1, 0, 2, 3)
    out = np.zeros((tensor.shape[0], len(points)) + tensor.shape[2:], dtype=np.int64)
    for i in range(points.shape[1]):
        term = f.vmul(points[None, :, i, None, None], tensor[:, None, i])
        out = f.vadd(out, term)
    return out


def point_ranks(coeffs: np.ndarray, n: int, q: int, points: np.ndarray | None = None) -> np.ndarray:
    """rank f(u, ., .) for every form and point, shape (B, U)."""
    pts = point_vectors(n, q) if points is None else points
    a = point_matrices(full_tensor(coeffs, n, q), pts, q)
    return linalg.batch_rank(a, field_create(q))


def has_singular_line_batch(coeffs: np.ndarray, n: int, q: int, block: int = BLOCK) -> np.ndarray:
    """Vectorised singular-line test with early exit per block of points."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.int64))
    pts = point_vectors(n, q)
    found = np.zeros(len(coeffs), dtype=bool)
    tensor = full_tensor(coeffs, n, q)
    for start in range(0, len(pts), block):
        todo = np.flatnonzero(~found)
        if not len(todo):
            break
        a = point_matrices(tensor[todo], pts[start:start + block], q)
        rk = linalg.batch_rank(a, field_create(q))
        found[todo] = (rk <= n - 1).any(axis=1)
    return found


def singular_line_witness(f: AlternatingForm):
    """A singular line of f (as a Subspace) or None; stops at the first witness."""
    from .projspace import span
    if f.is_zero:
        raise ValueError("zero form")
    if f.degree != 3:
        raise ValueError("expected a trilinear form")
    n, q = f.n, f.q
    fld = field_create(q)
    pts = point_vectors(n, q)
    tensor = full_tensor(np.asarray(f.coeffs), n, q)
    for start in range(0, len(pts), BLOCK):
        blk = pts[start:start + BLOCK]
        a = point_matrices(tensor, blk, q)[0]
        rk = linalg.batch_rank(a, fld)
        hit = np.flatnonzero(rk <= n - 1)
        if len(hit):
            u = blk[hit[0]]
            ker = linalg.nullspace(a[hit[0]].tolist(), n + 1, fld)
            for v in ker:
                line = span([u.tolist(), v], q)
                if line.dim == 1:
                    return line
    return None


def has_singular_line(f: AlternatingForm) -> bool:
    return singular_line_witness(f) is not None


def has_singular_line_slow(f: AlternatingForm) -> bool:
    """Oracle through the full singular locus of the complex."""
    return bool(singular_locus(LinearComplex(f.n, f.q, 2, f)).subspaces)


# -- search for complexes without singular lines --------------------

def hit_consequences(f: AlternatingForm) -> dict:
    """Downstream checks triggered by a form without singular lines."""
    from .partitions import partition_from_complex
    k = LinearComplex(f.n, f.q, 2, f)
    if singular_locus(k).subspaces:
        raise AssertionError(f"claimed hit {format_form(f)} has singular lines")
    out = {"form": format_form(f), "M_minus_n": pluecker_ambient_dim(f.n) - f.n}
    if f.n % 2 == 0:
        # spreads are checked (linear, span M-n, not geometric) inside partition_from_complex
        om = partition_from_complex(k)
        out["partition_classes"] = len(om.classes)
    return out


def _search_chunk(args) -> SearchReport:
    n, q, mode, payload, seed, budget, witness_limit = args
    rep = SearchReport(n, q, mode, seed, budget)
    chunk = 4096 if n <= 6 else 1024
    if mode == "exhaustive":
        lo, hi = payload
        ranges = [(s, min(s + chunk, hi)) for s in range(lo, hi, chunk)]
        blocks = (forms_block(n, q, a, b) for a, b in ranges)
    else:
        seq, share = payload
        rng = np.random.default_rng(seq)
        sizes = [min(chunk, share - s) for s in range(0, share, chunk)]
        blocks = (sample_forms(n, q, k, rng) for k in sizes)
    fld = field_create(q)
    for coeffs in blocks:
        if fld.is_prime:
            sing = has_singular_line_batch(coeffs, n, q)
        else:
            sing = np.array([has_singular_line(AlternatingForm(n, q, 3, tuple(map(int, c))))
                             for c in coeffs])
        rep.forms_tested += len(coeffs)
        for c in coeffs[~sing]:
            f = AlternatingForm(n, q, 3, tuple(int(a) for a in c))
            if has_singular_line_slow(f):
                raise AssertionError(f"fast path missed a singular line of {format_form(f)}")
            rep.forms_without_singular_line += 1
            if len(rep.witnesses) < witness_limit:
                rep.witnesses.append(format_form(f))
    return rep


def search_no_singular(n: int, q: int, mode: str = "random", budget: int | None = None,
                       seed: int | None = 0, workers: int = 1, cap: int = DEFAULT_CAP,
                       witness_limit: int = 10) -> SearchReport:
    """Look for alternating trilinear forms whose complex of planes has no singular line."""
    if n < 3:
        raise ValueError("need n >= 3")
    if workers < 1:
        raise ValueError("need at least one worker")
    t0 = time.perf_counter()
    total = form_count(n, q)
    if mode == "exhaustive":
        if total > cap:
            raise BudgetExceeded(f"{total} forms exceed the exhaustive cap {cap}")
        bounds = np.linspace(0, total, workers + 1).astype(np.int64)
        jobs = [(n, q, mode, (int(bounds[w]), int(bounds[w + 1])), seed, budget, witness_limit)
                for w in range(workers)]
    elif mode == "random":
        if budget is None or budget < 1:
            raise ValueError("random mode needs a positive budget")
        seqs = np.random.SeedSequence(seed).spawn(workers)
        shares = [budget // workers + (w < budget % workers) for w in range(workers)]
        jobs = [(n, q, mode, (seqs[w], shares[w]), seed, budget, witness_limit) for w in range(workers)]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if workers == 1:
        parts = [_search_chunk(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_search_chunk, jobs))
    rep = parts[0]
    for p in parts[1:]:
        rep = rep.merge(p)
    rep.workers = workers
    rep.budget = budget
    rep.seed = seed
    rep.witnesses = rep.witnesses[:witness_limit]
    if mode == "exhaustive" and rep.forms_tested != total:
        raise AssertionError("exhaustive partition does not cover the enumeration")
    for w in rep.witnesses:
        from .exterior import parse_form
        hit_consequences(parse_form(w, n, q))
    if mode == "random":
        rep.note = "random sampling: zero hits is consistency evidence, not a proof"
    rep.elapsed = time.perf_counter() - t0
    return rep


# -- forms whose singular lines form a spread (PG(5, q)) -------------

@dataclass
class SpreadForm:
    form: str
    geometric: bool
    linear: bool
    span_dim: int


def spread_form_mask(coeffs: np.ndarray, n: int, q: int) -> np.ndarray:
    """Singular lines form a spread iff every point has rank f(u, ., .) == n - 1."""
    return (point_ranks(coeffs, n, q) == n - 1).all(axis=1)


def _bit_encoding(n: int):
    """GF(2) encodings: point vector -> int, forms coefficient t -> bit."""
    big_n = comb(n + 1, 3)
    return big_n, (1 << np.arange(big_n - 1, -1, -1, dtype=np.int64))


def _line_kernels_gf2(n: int):
    """For each line of PG(n, 2): integer-encoded forms for which it is singular."""
    big_n, weights = _bit_encoding(n)
    s_i, t_i, ks, _ = _contraction_pattern(n, 3, 2)
    plm = pluecker_matrix(n, 2, 1)
    f2 = field_create(2)
    for li in range(len(plm)):
        lmap = np.zeros((n + 1, big_n), dtype=np.int64)
        lmap[ks, s_i] = plm[li][t_i]
        ker = linalg.nullspace(lmap.tolist(), big_n, f2)
        vals = np.zeros(1, dtype=np.int64)
        for b in ker:
            v = int(np.dot(np.asarray(b, dtype=np.int64), weights))
            vals = np.concatenate([vals, vals ^ v])
        yield li, vals


def _gf2_point_masks(n: int):
    pts = point_vectors(n, 2)
    pval = pts @ (1 << np.arange(n, -1, -1))
    lines = basis_array(n, 2, 1)
    w = 1 << np.arange(n, -1, -1)
    a = lines[:, 0] @ w
    b = lines[:, 1] @ w
    order = np.zeros(1 << (n + 1), dtype=np.int64)
    order[pval] = np.arange(len(pval))
    lmask = (np.uint64(1) << order[a].astype(np.uint64)) | (np.uint64(1) << order[b].astype(np.uint64)) \
        | (np.uint64(1) << order[a ^ b].astype(np.uint64))
    return a, b, lmask, order


def _gf2_spread_hits(n: int):
    """Exhaustive spread-form detection over GF(2) by accumulating line kernels."""
    big_n, _ = _bit_encoding(n)
    npts = 2 ** (n + 1) - 1
    if npts > 64:
        raise ValueError("bitmask accumulation supports at most 64 points")
    target = npts // 3
    full = np.uint64((1 << npts) - 1) if npts < 64 else np.uint64(2 ** 64 - 1)
    _, _, lmask, _ = _gf2_point_masks(n)
    cnt = np.zeros(1 << big_n, dtype=np.uint16)
    orr = np.zeros(1 << big_n, dtype=np.uint64)
    kernels = []
    for li, vals in _line_kernels_gf2(n):
        cnt[vals] += 1
        orr[vals] |= lmask[li]
        kernels.append(vals)
    vals = np.flatnonzero((cnt == target) & (orr == full))
    vals = vals[vals != 0]
    no_sing = int((cnt[1:] == 0).sum())
    hit_id = np.full(1 << big_n, -1, dtype=np.int64)
    hit_id[vals] = np.arange(len(vals))
    lines_of = np.zeros((len(vals), target), dtype=np.int64)
    fill = np.zeros(len(vals), dtype=np.int64)
    for li, kv in enumerate(kernels):
        h = hit_id[kv]
        h = h[h >= 0]
        lines_of[h, fill[h]] = li
        fill[h] += 1
    assert (fill == target).all()
    return vals, lines_of, no_sing


def _gf2_geometric(n: int, lines_of: np.ndarray, chunk: int = 1024) -> np.ndarray:
    """Vectorised is_geometric for GF(2) spreads given as line-index rows."""
    a, b, lmask, order = _gf2_point_masks(n)
    k = lines_of.shape[1]
    ii, jj = np.triu_indices(k, 1)
    out = np.zeros(len(lines_of), dtype=bool)
    one = np.uint64(1)
    for s in range(0, len(lines_of), chunk):
        lo = lines_of[s:s + chunk]
        pa, pb = a[lo], b[lo]
        li = np.stack([np.zeros_like(pa), pa, pb, pa ^ pb], axis=-1)  # (H, k, 4)
        x = li[:, ii, :, None] ^ li[:, jj, None, :]  # (H, P, 4, 4)
        x = x.reshape(x.shape[0], x.shape[1], 16)
        bits = np.where(x > 0, one << order[x].astype(np.uint64), np.uint64(0))
        solid = np.bitwise_or.reduce(bits, axis=2)  # (H, P)
        lm = lmask[lo]  # (H, k)
        inside = ((lm[:, None, :] & ~solid[:, :, None]) == 0).sum(axis=2)
        out[s:s + chunk] = (inside == 5).all(axis=1)
    return out


def _gf2_linear(n: int, lines_of: np.ndarray, chunk: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised is_linear (carrier = whole space) over GF(2) via XOR bases."""
    plm = pluecker_matrix(n, 2, 1)
    width = plm.shape[1]
    img = (plm * (1 << np.arange(width - 1, -1, -1))).sum(axis=1)
    lin = np.zeros(len(lines_of), dtype=bool)
    dims = np.zeros(len(lines_of), dtype=np.int64)
    for s in range(0, len(lines_of), chunk):
        lo = lines_of[s:s + chunk]
        hn = len(lo)
        basis = np.zeros((hn, width), dtype=np.int64)
        rows = np.arange(hn)
        for j in range(lo.shape[1]):
            x = img[lo[:, j]].copy()
            for bit in range(width - 1, -1, -1):
                hb = ((x >> bit) & 1).astype(bool)
                cur = basis[:, bit].copy()
                ins = hb & (cur == 0)
                red = hb & (cur != 0)
                basis[rows[ins], bit] = x[ins]
                x[ins] = 0
                x[red] ^= cur[red]
        x = np.broadcast_to(img, (hn, len(img))).copy()
        for bit in range(width - 1, -1, -1):
            hb = ((x >> bit) & 1).astype(bool)
            x ^= np.where(hb, basis[:, bit, None], 0)
        in_span = (x == 0).sum(axis=1)
        lin[s:s + chunk] = in_span == lo.shape[1]
        dims[s:s + chunk] = (basis != 0).sum(axis=1) - 1
    return lin, dims


def _generic_spread_form(f: AlternatingForm) -> SpreadForm | None:
    k = LinearComplex(f.n, f.q, 2, f)
    lines = singular_locus(k).subspaces
    from .projspace import whole
    carrier = whole(f.n, f.q)
    if not is_spread(lines, carrier):
        return None
    sp = LineSpread(carrier, tuple(lines))
    lin, dim = is_linear(sp)
    return SpreadForm(format_form(f), is_geometric(sp), lin, dim)


def classify_spread_forms(n: int = 5, q: int = 2, mode: str | None = None, budget: int | None = None,
                          seed: int | None = 0, allow_large: bool = False, verify_sample: int = 64,
                          cap: int = DEFAULT_CAP):
    """Forms on GF(q)^6 whose singular lines form a line spread, with their flags.

    Returns ``(hits, report)``.
    """
    if n != 5:
        raise ValueError("spread forms are classified in PG(5, q)")
    if q not in (2, 3):
        raise ValueError("q must be 2 or 3")
    mode = mode or ("exhaustive" if q == 2 else "random")
    t0 = time.perf_counter()
    total = form_count(n, q)
    rep = SearchReport(n, q, mode, seed, budget)
    hits: list[SpreadForm] = []
    if mode == "exhaustive":
        if total > cap and not allow_large:
            raise BudgetExceeded(f"{total} forms exceed the exhaustive cap {cap}")
        if q == 2:
            vals, lines_of, no_sing = _gf2_spread_hits(n)
            geo = _gf2_geometric(n, lines_of)
            lin, dims = _gf2_linear(n, lines_of)
            big_n, _ = _bit_encoding(n)
            shifts = np.arange(big_n - 1, -1, -1)
            coeffs = (vals[:, None] >> shifts) & 1
            # independent route: every hit satisfies the rank criterion
            for s in range(0, len(coeffs), 8192):
                if not spread_form_mask(coeffs[s:s + 8192], n, q).all():
                    raise AssertionError("kernel accumulation and rank criterion disagree")
            for i in np.linspace(0, len(vals) - 1, min(verify_sample, len(vals))).astype(int):
                f = AlternatingForm(n, q, 3, tuple(int(a) for a in coeffs[i]))
                g = _generic_spread_form(f)
                if g is None or (g.geometric, g.linear, g.span_dim) != (bool(geo[i]), bool(lin[i]), int(dims[i])):
                    raise AssertionError(f"fast and generic spread checks disagree on {format_form(f)}")
            for i in range(len(vals)):
                hits.append(SpreadForm(format_form(AlternatingForm(n, q, 3, tuple(int(a) for a in coeffs[i]))),
                                       bool(geo[i]), bool(lin[i]), int(dims[i])))
            rep.forms_tested = total
            rep.forms_without_singular_line = no_sing
        else:
            for s in range(0, total, 2048):
                coeffs = forms_block(n, q, s, min(s + 2048, total))
                hits.extend(_classify_block(coeffs, n, q, rep))
    elif mode == "random":
        if budget is None or budget < 1:
            raise ValueError("random mode needs a positive budget")
        rng = np.random.default_rng(seed)
        for s in range(0, budget, 2048):
            coeffs = sample_forms(n, q, min(2048, budget - s), rng)
            hits.extend(_classify_block(coeffs, n, q, rep))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rep.forms_whose_singular_lines_form_a_spread = len(hits)
    rep.witnesses = [h.form for h in hits[:10]]
    rep.elapsed = time.perf_counter() - t0
    return hits, rep


def _classify_block(coeffs: np.ndarray, n: int, q: int, rep: SearchReport) -> list[SpreadForm]:
    out = []
    mask = spread_form_mask(coeffs, n, q)
    sing = has_singular_line_batch(coeffs, n, q)
    rep.forms_tested += len(coeffs)
    rep.forms_without_singular_line += int((~sing).sum())
    for c in coeffs[mask]:
        g = _generic_spread_form(AlternatingForm(n, q, 3, tuple(int(a) for a in c)))
        if g is None:
            raise AssertionError("rank criterion and singular locus disagree")
        out.append(g)
    return out
