from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lincomplex.exterior import (
    AlternatingForm,
    GradeMismatch,
    MultiVector,
    NotDecomposable,
    contract,
    contraction_matrix,
    evaluate,
    format_form,
    index_tuples,
    is_decomposable,
    pair,
    parse_form,
    pluecker,
    pluecker_matrix,
    unpluecker,
    wedge,
    wedge_right,
)
from lincomplex.gf import field_create
from lincomplex.projspace import pencil_table, span, subspaces
from oracles import NaiveField, form_value, leibniz_det


def e(i, n=3):
    return tuple(int(j == i) for j in range(n + 1))


def test_wedge_examples():
    w = wedge([e(0), e(1)], 2)
    assert w.coeffs == (1, 0, 0, 0, 0, 0)
    assert wedge([e(0), e(0)], 2).is_zero
    w = wedge([(1, 1, 0, 0), (0, 1, 1, 0)], 2)
    assert w.support() == {(0, 1): 1, (0, 2): 1, (1, 2): 1}
    with pytest.raises(ValueError):
        wedge([(1, 0, 0), (1, 0, 0, 0)], 2)


@given(st.data())
def test_wedge_is_minors(data):
    q = data.draw(st.sampled_from([2, 3, 4, 5]))
    n = data.draw(st.integers(1, 5))
    k = data.draw(st.integers(1, min(3, n + 1)))
    vs = data.draw(st.lists(st.lists(st.integers(0, q - 1), min_size=n + 1, max_size=n + 1),
                            min_size=k, max_size=k))
    N = NaiveField(q, field_create(q).modulus)
    w = wedge(vs, q)
    for t, c in zip(index_tuples(n, k), w.coeffs):
        assert c == leibniz_det([[v[j] for j in t] for v in vs], N)


def test_pluecker_examples():
    assert pluecker(span([e(0), e(1)], 2)).coeffs == (1, 0, 0, 0, 0, 0)
    lines = subspaces(3, 2, 1)
    assert len({pluecker(l).coeffs for l in lines}) == 35
    for l in lines:
        p = pluecker(l).coeffs
        assert (p[0] * p[5] - p[1] * p[4] + p[2] * p[3]) % 2 == 0
    with pytest.raises(ValueError):
        pluecker(span([], 2, 3))


@pytest.mark.parametrize("n,q,d", [(3, 2, 1), (4, 2, 2), (3, 3, 1), (4, 3, 1), (5, 2, 2)])
def test_pluecker_round_trip(n, q, d):
    for x in subspaces(n, q, d):
        assert unpluecker(pluecker(x)) == x


def test_unpluecker_examples():
    assert unpluecker(MultiVector(3, 2, 2, (1, 0, 0, 0, 0, 0))) == span([e(0), e(1)], 2)
    with pytest.raises(NotDecomposable):
        unpluecker(MultiVector(3, 2, 2, (1, 0, 0, 0, 0, 1)))
    with pytest.raises(ValueError):
        unpluecker(MultiVector(3, 2, 2, (0,) * 6))


@pytest.mark.parametrize("q", [2, 3])
def test_decomposable_iff_klein_form_vanishes(q):
    F = field_create(q)
    seen = 0
    for c in product(range(q), repeat=6):
        if not any(c) or next(a for a in c if a) != 1:
            continue
        seen += 1
        klein = F.add(F.sub(F.mul(c[0], c[5]), F.mul(c[1], c[4])), F.mul(c[2], c[3]))
        assert is_decomposable(MultiVector(3, q, 2, c)) == (klein == 0)
    assert seen == (q ** 6 - 1) // (q - 1)


@pytest.mark.parametrize("n,q,h", [(3, 2, 1), (4, 2, 2), (3, 3, 1)])
def test_pencils_map_to_plucker_lines(n, q, h):
    F = field_create(q)
    from lincomplex import linalg
    pm = pluecker_matrix(n, q, h)
    pt = pencil_table(n, q, h)
    ranks = linalg.batch_rank(pm[pt.members], F)
    assert (ranks == 2).all()


@given(st.data())
def test_pairing_matches_evaluation(data):
    q = data.draw(st.sampled_from([2, 3]))
    n = data.draw(st.integers(2, 5))
    m = data.draw(st.integers(1, min(4, n + 1)))
    tuples = index_tuples(n, m)
    coeffs = data.draw(st.lists(st.integers(0, q - 1), min_size=len(tuples), max_size=len(tuples)))
    f = AlternatingForm(n, q, m, tuple(coeffs))
    d = m - 1
    x = data.draw(st.sampled_from(subspaces(n, q, d)))
    N = NaiveField(q, field_create(q).modulus)
    terms = dict(zip(tuples, coeffs))
    want = form_value(terms, list(x.rows), N)
    assert evaluate(f, list(x.rows)) == want
    # pluecker is normalised, which on an RREF basis is already the raw wedge
    assert pair(f, wedge(list(x.rows), q)) == want
    assert f(*x.rows) == want


@given(st.data())
def test_contraction_pairing_identity(data):
    q = data.draw(st.sampled_from([2, 3, 5]))
    n = data.draw(st.integers(2, 5))
    m = data.draw(st.integers(2, min(4, n + 1)))
    tuples = index_tuples(n, m)
    f = AlternatingForm(n, q, m, tuple(data.draw(st.lists(st.integers(0, q - 1), min_size=len(tuples),
                                                                      max_size=len(tuples)))))
    vs = data.draw(st.lists(st.lists(st.integers(0, q - 1), min_size=n + 1, max_size=n + 1),
                            min_size=m - 1, max_size=m - 1))
    w = data.draw(st.lists(st.integers(0, q - 1), min_size=n + 1, max_size=n + 1))
    F = field_create(q)
    p = wedge(vs, q)
    cov = contract(f, p)
    lhs = 0
    for a, b in zip(cov, w):
        lhs = F.add(lhs, F.mul(a, b))
    assert lhs == pair(f, wedge_right(p, w)) == evaluate(f, vs + [w])
    # the matrix form agrees
    mat = contraction_matrix(f)
    assert tuple(F.matmul(np.array(p.coeffs), mat)) == cov


def test_contraction_examples():
    f = parse_form("012", 3, 2)
    assert contract(f, wedge([e(0), e(1)], 2)) == (0, 0, 1, 0)
    assert contract(f, wedge([e(0), e(3)], 2)) == (0, 0, 0, 0)
    with pytest.raises(GradeMismatch):
        contract(f, wedge([e(0)], 2))


def test_contraction_signs_in_odd_characteristic():
    # e*_{012} contracted by e_{02} leaves -e*_1: f(e0, e2, w) = -w_1
    f = parse_form("012", 3, 3)
    assert contract(f, wedge([e(0), e(2)], 3)) == (0, 2, 0, 0)
    assert contract(f, wedge([e(1), e(2)], 3)) == (1, 0, 0, 0)
    assert contract(f, wedge([e(0), e(1)], 3)) == (0, 0, 1, 0)
    # swapping the multivector's factors flips every sign
    assert contract(f, wedge([e(2), e(0)], 3)) == (0, 1, 0, 0)


def test_form_literals():
    f = parse_form("2*012+1*134", 4, 3)
    assert f.support() == {(0, 1, 2): 2, (1, 3, 4): 1}
    assert format_form(f) == "2*012+134"
    assert parse_form(format_form(f), 4, 3) == f
    g = parse_form("01(10)", 10, 2)
    assert g.support() == {(0, 1, 10): 1} and format_form(g) == "01(10)"
    assert format_form(AlternatingForm(3, 2, 2, (0,) * 6)) == "0"
    for bad in ("0x1", "012+01", "3*012", "021", "00", ""):
        with pytest.raises(ValueError):
            parse_form(bad, 3, 3)


@given(st.data())
def test_form_literal_round_trip(data):
    q = data.draw(st.sampled_from([2, 3, 4, 16]))
    n = data.draw(st.integers(2, 11))
    m = data.draw(st.integers(1, 3))
    size = len(index_tuples(n, m))
    coeffs = data.draw(st.lists(st.integers(0, q - 1), min_size=size, max_size=size))
    f = AlternatingForm(n, q, m, tuple(coeffs))
    if not f.is_zero:
        assert parse_form(format_form(f), n, q) == f
