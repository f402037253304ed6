from itertools import combinations

import pytest

from lincomplex.complexes import LinearComplex
from lincomplex.exterior import parse_form, pluecker
from lincomplex.projspace import GeometryError, hyperplane, point, span, subspaces, whole
from lincomplex.spreads import (
    LineSpread,
    NotSingularFree,
    field_reduction_spread,
    is_geometric,
    is_linear,
    is_spread,
    pluecker_ambient_dim,
    random_line_spread,
    read_lines,
    spread_from_complex,
    spread_report,
    write_lines,
)
from lincomplex.suite import all_forms, data_path


def brute_is_spread(lines, carrier):
    pts = [set(l.points()) for l in lines]
    cover = set().union(*pts) if pts else set()
    disjoint = all(not (a & b) for a, b in combinations(pts, 2))
    return disjoint and cover == set(carrier.points())


@pytest.mark.parametrize("m,q,size", [(2, 2, 5), (3, 2, 21), (2, 3, 10), (3, 3, 91)])
def test_field_reduction_spreads(m, q, size):
    s = field_reduction_spread(m, q)
    assert len(s) == size and s.carrier == whole(2 * m - 1, q)
    assert is_spread(s.lines, s.carrier) and brute_is_spread(s.lines, s.carrier)
    assert is_geometric(s)
    lin, dim = is_linear(s)
    assert lin


def test_field_reduction_errors():
    for m in (1, 4):
        with pytest.raises(ValueError):
            field_reduction_spread(m, 2)


def test_linear_span_dimensions():
    assert is_linear(field_reduction_spread(2, 2)) == (True, 3)
    assert is_linear(field_reduction_spread(3, 2)) == (True, 8)


def test_linear_by_brute_force_intersection():
    """The span of a spread's Plücker images meets the Grassmannian in the spread itself."""
    from lincomplex.gf import field_create
    from lincomplex import linalg
    F = field_create(2)
    for sp in (field_reduction_spread(2, 2), field_reduction_spread(3, 2)):
        imgs = [list(pluecker(l).coeffs) for l in sp.lines]
        r = linalg.rank(imgs, F)
        inside = [l for l in subspaces(sp.carrier.n, 2, 1)
                  if linalg.rank(imgs + [list(pluecker(l).coeffs)], F) == r]
        assert set(inside) == set(sp.lines)


def test_is_spread_examples():
    e = point((0, 0, 0, 1), 2)
    star7 = [l for l in subspaces(3, 2, 1) if l.contains(e)]
    assert len(star7) == 7 and not is_spread(star7, whole(3, 2))
    with pytest.raises(GeometryError):
        is_spread(star7, hyperplane((0, 0, 0, 1), 2))


def test_five_disjoint_lines_of_pg32_form_a_spread():
    lines = subspaces(3, 2, 1)
    pts = {l: set(l.points()) for l in lines}
    found = 0

    def extend(chosen, start):
        nonlocal found
        if len(chosen) == 5:
            assert is_spread(chosen, whole(3, 2))
            found += 1
            return
        for i in range(start, len(lines)):
            if all(not (pts[lines[i]] & pts[c]) for c in chosen):
                extend(chosen + [lines[i]], i + 1)

    extend([], 0)
    assert found == 56  # spreads of PG(3,2)


def test_spreads_of_pg3_are_geometric():
    for seed in range(5):
        s = random_line_spread(whole(3, 2), seed)
        assert is_spread(s.lines, s.carrier) and is_geometric(s)


def test_random_fixture_is_not_geometric():
    lines = read_lines(data_path("pg52_random_spread.txt"), 2)
    s = LineSpread(whole(5, 2), tuple(lines))
    assert is_spread(s.lines, s.carrier)
    assert not is_geometric(s)
    assert is_linear(s) == (False, 14)


def test_geometric_by_brute_force():
    lines = read_lines(data_path("pg52_random_spread.txt"), 2)
    pts = [set(l.points()) for l in lines]
    ok = True
    for a, b in combinations(range(len(lines)), 2):
        solid = set(lines[a].join(lines[b]).points())
        inside = [p for p in pts if p <= solid]
        ok &= len(inside) == 5
    assert ok == is_geometric(LineSpread(whole(5, 2), tuple(lines)))


def test_spreads_in_a_subspace():
    hyp = hyperplane((0, 0, 0, 0, 1), 2)
    s = random_line_spread(hyp, 3)
    assert len(s) == 5 and all(hyp.contains(l) for l in s.lines)
    assert is_spread(s.lines, hyp) and brute_is_spread(s.lines, hyp)
    with pytest.raises(GeometryError):
        random_line_spread(hyperplane((0, 0, 0, 0, 1, 1), 2), 3)


def test_spread_from_complex_examples():
    k = LinearComplex(4, 2, 2, parse_form("012+034", 4, 2))
    cand = spread_from_complex(k, hyperplane((0, 0, 0, 0, 1), 2), strict=False)
    assert cand.is_spread is False
    assert len(cand.lines) == 4
    for f in list(all_forms(4, 2, 3))[::50]:
        with pytest.raises(NotSingularFree):
            spread_from_complex(LinearComplex(4, 2, 2, f), hyperplane((0, 0, 0, 0, 1), 2))


def test_candidate_sets_partition_the_non_singular_lines():
    k = LinearComplex(4, 2, 2, parse_form("012+034+123", 4, 2))
    from lincomplex.complexes import singular_locus
    seen = []
    for hyp in subspaces(4, 2, 3):
        cand = spread_from_complex(k, hyp, strict=False)
        assert all(hyp.contains(l) for l in cand.lines)
        seen.extend(cand.lines)
    assert len(seen) == len(set(seen))
    assert set(seen) | set(singular_locus(k).subspaces) == set(subspaces(4, 2, 1))


def test_wrong_degree_is_rejected():
    from lincomplex.complexes import ComplexError
    with pytest.raises(ComplexError):
        spread_from_complex(LinearComplex(3, 2, 1, parse_form("01+23", 3, 2)), hyperplane((0, 0, 0, 1), 2))


def test_pluecker_ambient_dim():
    # M = (n^2 + n - 2) / 2 is the dimension of the Plücker space of lines of PG(n, q)
    for n in range(2, 9):
        from math import comb
        assert pluecker_ambient_dim(n) == comb(n + 1, 2) - 1


def test_files_and_report(tmp_path):
    s = field_reduction_spread(2, 3)
    p = tmp_path / "s.txt"
    write_lines(p, s.lines, header="field reduction\nq = 3")
    assert read_lines(p, 3) == list(s.lines)
    rep = spread_report(s)
    assert rep == {"carrier": "1000;0100;0010;0001", "size": 10, "is_spread": True,
                   "is_geometric": True, "is_linear": True, "span_dim": 3}
    bad = spread_report(LineSpread(whole(3, 3), s.lines[:-1]))
    assert bad["is_spread"] is False and bad["is_geometric"] is None
