import random

import pytest
from hypothesis import given, strategies as st

from lincomplex.gf import field_create
from lincomplex.projspace import (
    GeometryError,
    count_subspaces,
    empty,
    enumerate_subspaces,
    format_subspace,
    gaussian_binomial,
    hyperplane,
    hyperplane_covector,
    interval_coords,
    join,
    lift,
    meet,
    parse_subspace,
    pencil,
    pencil_table,
    point,
    span,
    subspace_index,
    subspaces,
    whole,
)
from oracles import NaiveField, lin_span_set, vectors


def vecs(n, q, max_count=4):
    return st.lists(st.lists(st.integers(0, q - 1), min_size=n + 1, max_size=n + 1),
                    min_size=0, max_size=max_count)


def test_span_examples():
    x = span([(1, 1, 0, 0), (1, 0, 1, 0)], 2)
    assert x.rows == ((1, 0, 1, 0), (0, 1, 1, 0))
    assert span([], 2, 3).dim == -1
    assert span([(0, 0, 0, 0)], 2).dim == -1 and span([(0, 0, 0, 0)], 2).is_empty


def test_span_rejects_mixed_lengths():
    with pytest.raises(ValueError):
        span([(1, 0, 0), (1, 0, 0, 0)], 2)


def test_join_meet_examples():
    e0, e1 = point((1, 0, 0, 0), 2), point((0, 1, 0, 0), 2)
    assert join(e0, e1) == span([(1, 0, 0, 0), (0, 1, 0, 0)], 2)
    p1, p2 = hyperplane((1, 0, 0, 0), 2), hyperplane((0, 1, 0, 0), 2)
    assert meet(p1, p2).dim == 1
    assert meet(p1, p1) == p1
    with pytest.raises(GeometryError):
        join(e0, point((1, 0, 0), 2))


@pytest.mark.parametrize("n,q,d,want", [(3, 2, 1, 35), (4, 2, 2, 155), (2, 2, 0, 7)])
def test_enumeration_examples(n, q, d, want):
    assert len(subspaces(n, q, d)) == want


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5, 6])
def test_counts_match_gaussian_binomials(n, q):
    if q == 3 and n > 4:
        pytest.skip("large for a unit test")
    for d in range(-1, n + 1):
        subs = subspaces(n, q, d)
        assert len(subs) == gaussian_binomial(n + 1, d + 1, q) == count_subspaces(n, q, d)
        assert len(set(subs)) == len(subs)
        assert list(subs) == sorted(subs)


@pytest.mark.parametrize("n,q", [(2, 2), (3, 2), (2, 3), (2, 4)])
def test_enumeration_matches_brute_force_spans(n, q):
    """Every set of vectors spans exactly one enumerated subspace, and vice versa."""
    F = NaiveField(q, field_create(q).modulus)
    for d in range(0, n + 1):
        want = set()
        vs = [v for v in vectors(n, q) if any(v)]
        rng = random.Random(d)
        for _ in range(3000):
            gens = rng.sample(vs, d + 1)
            s = lin_span_set(gens, F)
            if len(s) == q ** (d + 1):
                want.add(s)
        got = {lin_span_set(list(x.rows), F) for x in subspaces(n, q, d)}
        assert want <= got
        assert len(got) == gaussian_binomial(n + 1, d + 1, q)


def test_enumeration_is_resumable():
    full = subspaces(4, 2, 1)
    assert list(enumerate_subspaces(4, 2, 1, start=100)) == list(full[100:])
    idx = subspace_index(4, 2, 1)
    assert all(idx[x] == i for i, x in enumerate(full))


def test_enumeration_range_errors():
    with pytest.raises(GeometryError):
        subspaces(3, 2, 4)
    with pytest.raises(GeometryError):
        subspaces(3, 2, -2)


@given(st.data())
def test_canonicity_under_permutation(data):
    q = data.draw(st.sampled_from([2, 3, 4, 5]))
    n = data.draw(st.integers(1, 5))
    vs = data.draw(vecs(n, q))
    perm = data.draw(st.permutations(vs))
    assert span(vs, q, n) == span(perm, q, n)
    x = span(vs, q, n)
    for r in x.rows:
        p = next(i for i, a in enumerate(r) if a)
        assert r[p] == 1
        assert all(other[p] == 0 for other in x.rows if other is not r)


@given(st.data())
def test_dimension_formula_and_modular_law(data):
    q = data.draw(st.sampled_from([2, 3, 4]))
    n = data.draw(st.integers(1, 5))
    u = span(data.draw(vecs(n, q)), q, n)
    v = span(data.draw(vecs(n, q)), q, n)
    w0 = span(data.draw(vecs(n, q)), q, n)
    assert u.dim + v.dim == join(u, v).dim + meet(u, v).dim
    w = join(u, w0)  # forces U <= W
    assert join(u, meet(v, w)) == meet(join(u, v), w)
    assert meet(u, v).contains(empty(n, q))
    assert join(u, v).contains(u) and u.contains(meet(u, v))


@given(st.data())
def test_literals_round_trip(data):
    q = data.draw(st.sampled_from([2, 3, 4, 11, 16]))
    n = data.draw(st.integers(0, 5))
    x = span(data.draw(vecs(n, q)), q, n)
    assert parse_subspace(format_subspace(x), q, n) == x


def test_literal_syntax():
    assert parse_subspace("1000;0100", 2) == span([(1, 0, 0, 0), (0, 1, 0, 0)], 2)
    assert format_subspace(empty(3, 2)) == "-"
    assert parse_subspace("-", 2, 3) == empty(3, 2)
    with pytest.raises(ValueError):
        parse_subspace("1020", 2)
    with pytest.raises(ValueError):
        parse_subspace("10;100", 2)


def test_points_and_containment():
    plane = hyperplane((0, 0, 0, 1), 2)
    pts = plane.points()
    assert len(pts) == 7 and all(v[3] == 0 for v in pts)
    assert hyperplane_covector(plane) == (0, 0, 0, 1)
    assert hyperplane(hyperplane_covector(plane), 2) == plane
    for h in subspaces(3, 3, 2):
        assert hyperplane(hyperplane_covector(h), 3) == h


@pytest.mark.parametrize("n,q,h", [(2, 2, 0), (3, 2, 1), (3, 3, 1), (4, 2, 1), (3, 2, 2), (4, 3, 2)])
def test_pencils_meet_in_their_vertex(n, q, h):
    pt = pencil_table(n, q, h)
    lo, mid, hi = subspaces(n, q, h - 1), subspaces(n, q, h), subspaces(n, q, h + 1)
    assert pt.members.shape[1] == q + 1
    for p in range(len(pt.members)):
        u, w = lo[pt.vertex[p]], hi[pt.carrier[p]]
        mem = [mid[i] for i in pt.members[p]]
        assert len(set(mem)) == q + 1
        for i, a in enumerate(mem):
            assert a.contains(u) and w.contains(a)
            for b in mem[i + 1:]:
                assert meet(a, b) == u
    # every pair of (h-1, h+1) incident subspaces gives exactly one pencil
    expect = len(lo) * gaussian_binomial(n - h + 1, 2, q)
    assert len(pt.members) == expect


def test_pencil_function():
    u = point((1, 0, 0, 0), 2)
    w = hyperplane((0, 0, 0, 1), 2)
    pc = pencil(u, w)
    assert len(pc.members) == 3
    assert all(m.contains(u) and w.contains(m) for m in pc.members)
    with pytest.raises(GeometryError):
        pencil(point((0, 0, 0, 1), 2), w)
    with pytest.raises(GeometryError):
        pencil(u, whole(3, 2))


def test_stars_and_faces():
    pt = pencil_table(3, 2, 1)
    lines = subspaces(3, 2, 1)
    pts = subspaces(3, 2, 0)
    planes = subspaces(3, 2, 2)
    assert all(len(s) == 7 for s in pt.stars)  # lines through a point of PG(3,2)
    assert all(len(s) == 7 for s in pt.dual_stars)  # lines in a plane
    for i, face in enumerate(pt.faces):  # points on a line
        assert len(face) == 3 and all(lines[i].contains(pts[j]) for j in face)
    for j, st_ in enumerate(pt.dual_stars):
        assert all(planes[j].contains(lines[i]) for i in st_)


def test_interval_coords_examples():
    w = whole(3, 2)
    ic = interval_coords(empty(3, 2), w)
    for x in subspaces(3, 2, 1):
        assert ic.to_coords(x) == x
    e = point((1, 0, 0, 0), 2)
    ic = interval_coords(e, w)
    assert ic.dim == 2
    images = {ic.to_coords(l) for l in subspaces(3, 2, 1) if l.contains(e)}
    assert len(images) == 7 and all(x.dim == 0 and x.n == 2 for x in images)
    with pytest.raises(GeometryError):
        interval_coords(point((0, 1, 0, 0), 2), hyperplane((0, 1, 0, 0), 2))


@pytest.mark.parametrize("q", [2, 3])
def test_interval_coords_round_trip_and_order(q):
    n = 4
    rng = random.Random(q)
    for _ in range(10):
        u = rng.choice(subspaces(n, q, 0))
        w = rng.choice([x for x in subspaces(n, q, 3) if x.contains(u)])
        ic = interval_coords(u, w)
        inside = [x for d in range(0, 4) for x in subspaces(n, q, d) if x.contains(u) and w.contains(x)]
        for x in inside:
            y = ic.to_coords(x)
            assert y.dim == x.dim - u.dim - 1
            assert ic.from_coords(y) == x
        for x in inside[:15]:
            for z in inside[:15]:
                assert x.contains(z) == ic.to_coords(x).contains(ic.to_coords(z))


def test_lift_into_a_carrier():
    carrier = hyperplane((0, 0, 0, 1), 3)
    for l in subspaces(2, 3, 1):
        x = lift(l, carrier)
        assert x.dim == 1 and carrier.contains(x)
    assert len({lift(l, carrier) for l in subspaces(2, 3, 1)}) == 13
