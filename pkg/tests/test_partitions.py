import pytest

from lincomplex.complexes import LinearComplex, is_prime_mask
from lincomplex.projspace import GeometryError, count_subspaces, hyperplane, span, subspaces
from lincomplex.partitions import (
    DegenerateAmbient,
    LinePartition,
    MalformedPartition,
    NonLinearInput,
    complex_from_partition,
    find_nonlinear_pencil,
    is_linear_partition,
    partition_from_complex,
    partition_problems,
    partition_report,
    pi_omega,
    read_partition,
    related_plane_mask,
    trivial_partition,
    verify_partition,
    write_partition,
)
from lincomplex.spreads import NotSingularFree
from lincomplex.suite import all_forms, data_path, random_forms


@pytest.fixture(scope="module")
def pg42():
    return read_partition(data_path("pg42_partition.txt"), 2)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_trivial_partitions(q):
    om = trivial_partition(q)
    assert verify_partition(om) and is_linear_partition(om)
    for l in subspaces(2, q, 1):
        assert pi_omega(om, l) == l


def test_stored_trivial_partitions_load():
    for name, q in (("pg22_trivial_partition.txt", 2), ("pg23_trivial_partition.txt", 3)):
        om = read_partition(data_path(name), q)
        assert om.classes == trivial_partition(q).classes


def test_counting_identity_pg42():
    nh, npts, nlines = count_subspaces(4, 2, 3), count_subspaces(3, 2, 0), count_subspaces(4, 2, 1)
    assert nh * npts // 3 == nlines == 155 and nh * 5 == 155


def test_dropped_class_is_invalid():
    om = read_partition(data_path("pg22_dropped_class.txt"), 2)
    probs = partition_problems(om)
    assert probs and "has no class" in probs[0]
    assert not verify_partition(om)
    rep = partition_report(om)
    assert rep["valid"] is False and rep["witness"]


def test_malformed_carrier_is_an_error():
    lines = subspaces(2, 2, 1)
    classes = {l: (l,) for l in lines}
    classes[lines[0]] = (lines[1],)
    with pytest.raises(MalformedPartition):
        verify_partition(LinePartition(2, 2, classes))


def test_overlapping_classes_are_reported(pg42):
    from lincomplex.spreads import random_line_spread
    hyp = next(iter(pg42.classes))
    seed = 0
    while True:
        other = random_line_spread(hyp, seed)
        if set(other.lines) != set(pg42.classes[hyp]):
            break
        seed += 1
    classes = dict(pg42.classes)
    classes[hyp] = other.lines
    probs = partition_problems(LinePartition(4, 2, classes), limit=50)
    assert any("lies in the classes" in p for p in probs)
    assert any("uncovered" in p for p in probs)


def test_stored_partition_is_valid_but_not_linear(pg42):
    assert verify_partition(pg42)
    assert not is_linear_partition(pg42)
    p = find_nonlinear_pencil(pg42)
    assert len(p.members) == 3 and all(p.carrier.contains(m) and m.contains(p.vertex) for m in p.members)
    rep = partition_report(pg42)
    assert rep["valid"] and rep["linear"] is False
    assert set(rep["witness"]) == {"vertex", "carrier", "members", "images"}


def test_pi_omega_properties(pg42):
    lines = subspaces(4, 2, 1)
    for hyp, cls in pg42.classes.items():
        assert all(pi_omega(pg42, l) == hyp for l in cls)
    for a in lines:
        assert pi_omega(pg42, a).contains(a)
    for i, a in enumerate(lines):
        for b in lines[i + 1:]:
            if not a.meet(b).is_empty:
                assert pi_omega(pg42, a) != pi_omega(pg42, b)
    with pytest.raises(GeometryError):
        pi_omega(pg42, subspaces(4, 2, 0)[0])


def test_complex_from_partition_rejects(pg42):
    with pytest.raises(NonLinearInput) as exc:
        complex_from_partition(pg42)
    assert exc.value.pencil is not None
    # the related plane set is not a prime, as the iff predicts
    assert not is_prime_mask(related_plane_mask(pg42), 4, 2, 2)
    with pytest.raises(DegenerateAmbient):
        complex_from_partition(trivial_partition(2))


def test_partition_from_complex_needs_singular_free_input():
    for f in list(all_forms(4, 2, 3))[::37]:
        with pytest.raises(NotSingularFree):
            partition_from_complex(LinearComplex(4, 2, 2, f))
    for f in random_forms(6, 2, 3, 3, seed=2):
        with pytest.raises(NotSingularFree):
            partition_from_complex(LinearComplex(6, 2, 2, f))


def test_file_round_trip(tmp_path, pg42):
    p = tmp_path / "om.txt"
    write_partition(p, pg42, header="copy")
    again = read_partition(p, 2)
    assert again.classes == pg42.classes


def test_file_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("100;010\n")
    with pytest.raises(MalformedPartition):
        read_partition(p, 2)
    p.write_text("H 100;010\n100;010\nH 100;010\n")
    with pytest.raises(MalformedPartition):
        read_partition(p, 2)
    p.write_text("# nothing\n")
    with pytest.raises(MalformedPartition):
        read_partition(p, 2)
