"""Line partitions of PG(n, q): one spread per hyperplane.

Partitions are always stored extensionally, hyperplane -> explicit lines.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .complexes import ComplexError, LinearComplex, complex_from_members, is_prime_mask
from .gf import field_create
from .projspace import (
    GeometryError,
    Pencil,
    Subspace,
    count_subspaces,
    format_subspace,
    hyperplane_covector,
    parse_subspace,
    pencil_table,
    subspace_index,
    subspaces,
)
from .spreads import NotSingularFree, is_spread, polar_line_covectors, spread_from_complex


class MalformedPartition(ValueError):
    pass


class DegenerateAmbient(ComplexError):
    pass


class NonLinearInput(ComplexError):
    def __init__(self, message: str, pencil: Pencil):
        super().__init__(message)
        self.pencil = pencil


@dataclass(frozen=True)
class LinePartition:
    n: int
    q: int
    classes: dict  # hyperplane Subspace -> tuple of line Subspaces

    @cached_property
    def _owner(self) -> dict[Subspace, Subspace]:
        out = {}
        for hyp, lines in self.classes.items():
            for l in lines:
                out.setdefault(l, hyp)
        return out

    def __hash__(self):
        return id(self)


def trivial_partition(q: int) -> LinePartition:
    """PG(2, q): every line is the unique spread of itself."""
    return LinePartition(2, q, {l: (l,) for l in subspaces(2, q, 1)})


def _check_carriers(om: LinePartition) -> None:
    for hyp, lines in om.classes.items():
        if hyp.n != om.n or hyp.q != om.q or hyp.dim != om.n - 1:
            raise MalformedPartition(f"key {hyp} is not a hyperplane of PG({om.n},{om.q})")
        for l in lines:
            if l.dim != 1 or not hyp.contains(l):
                raise MalformedPartition(f"{l} is not a line of its key hyperplane {hyp}")


def partition_problems(om: LinePartition, limit: int = 5) -> list[str]:
    """Witnesses against the partition axioms (empty list means valid)."""
    _check_carriers(om)
    n, q = om.n, om.q
    out: list[str] = []
    nh = count_subspaces(n, q, n - 1)
    npts = count_subspaces(n - 1, q, 0)
    nlines = count_subspaces(n, q, 1)
    if nh * npts != nlines * (q + 1):
        out.append(f"counting identity fails: {nh} * {npts} / {q + 1} != {nlines}")
    for hyp in subspaces(n, q, n - 1):
        if hyp not in om.classes:
            out.append(f"hyperplane {hyp} has no class")
        elif not is_spread(om.classes[hyp], hyp):
            out.append(f"class of {hyp} is not a line spread of it")
    seen: dict[Subspace, Subspace] = {}
    for hyp, lines in om.classes.items():
        for l in lines:
            if l in seen:
                out.append(f"line {l} lies in the classes of {seen[l]} and {hyp}")
            seen[l] = hyp
    missing = [l for l in subspaces(n, q, 1) if l not in seen]
    if missing:
        out.append(f"{len(missing)} lines uncovered, e.g. {missing[0]}")
    return out[:limit]


def verify_partition(om: LinePartition) -> bool:
    return not partition_problems(om, limit=1)


def pi_omega(om: LinePartition, line: Subspace) -> Subspace:
    if line.dim != 1:
        raise GeometryError(f"{line} is not a line")
    try:
        return om._owner[line]
    except KeyError:
        raise GeometryError(f"line {line} is in no class") from None


def _image_covectors(om: LinePartition) -> np.ndarray:
    return np.array([hyperplane_covector(pi_omega(om, l)) for l in subspaces(om.n, om.q, 1)],
                    dtype=np.int64)


def find_nonlinear_pencil(om: LinePartition) -> Pencil | None:
    """First pencil of lines whose images do not form a pencil of hyperplanes."""
    f = field_create(om.q)
    pt = pencil_table(om.n, om.q, 1)
    img = _image_covectors(om)[pt.members]
    rk = linalg.batch_rank(img, f)
    bad = np.flatnonzero(rk != 2)
    if not len(bad):
        return None
    p = bad[0]
    lines = subspaces(om.n, om.q, 1)
    return Pencil(subspaces(om.n, om.q, 0)[pt.vertex[p]], subspaces(om.n, om.q, 2)[pt.carrier[p]],
                  tuple(lines[i] for i in pt.members[p]))


def is_linear_partition(om: LinePartition) -> bool:
    return find_nonlinear_pencil(om) is None


def related_plane_mask(om: LinePartition) -> np.ndarray:
    """Planes e with a line l such that l < e < pi_omega(l)."""
    pt = pencil_table(om.n, om.q, 2)
    lines = subspaces(om.n, om.q, 1)
    planes = subspaces(om.n, om.q, 2)
    return np.array([any(pi_omega(om, lines[u]).contains(planes[x]) for u in faces)
                     for x, faces in enumerate(pt.faces)])


def complex_from_partition(om: LinePartition) -> LinearComplex:
    """The related complex of planes; NonLinearInput unless the partition is linear."""
    if om.n < 4:
        raise DegenerateAmbient("the related plane set is degenerate for n < 4")
    mask = related_plane_mask(om)
    prime = is_prime_mask(mask, om.n, om.q, 2)
    bad = find_nonlinear_pencil(om)
    if bad is not None:
        if prime:
            raise AssertionError("non-linear partition produced a prime plane set")
        members = ", ".join(str(m) for m in bad.members)
        raise NonLinearInput(f"pencil [{members}] is not mapped onto a pencil of hyperplanes", bad)
    if not prime:
        raise AssertionError("linear partition produced a non-prime plane set")
    planes = subspaces(om.n, om.q, 2)
    k = complex_from_members([planes[i] for i in np.flatnonzero(mask)], om.n, om.q, 2)
    if not polar_line_covectors(k).any(axis=1).all():
        raise AssertionError("complex related to a linear partition has a singular line")
    return k


def partition_from_complex(k: LinearComplex) -> LinePartition:
    if not polar_line_covectors(k).any(axis=1).all():
        raise NotSingularFree("the complex has singular lines")
    classes = {hyp: spread_from_complex(k, hyp, strict=True).lines
               for hyp in subspaces(k.n, k.q, k.n - 1)}
    om = LinePartition(k.n, k.q, classes)
    if not (verify_partition(om) and is_linear_partition(om)):
        raise AssertionError("partition of a singular-free complex is not a linear partition")
    return om


# -- file format -----------------------------------------------------

def read_partition(path, q: int) -> LinePartition:
    """Blocks headed ``H <subspace>`` followed by one line per row."""
    classes: dict[Subspace, list[Subspace]] = {}
    cur = None
    n = None
    with open(path) as fh:
        for num, raw in enumerate(fh, 1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            if text.startswith("H"):
                cur = parse_subspace(text[1:], q)
                if cur in classes:
                    raise MalformedPartition(f"line {num}: hyperplane {cur} appears twice")
                classes[cur] = []
                n = cur.n
            else:
                if cur is None:
                    raise MalformedPartition(f"line {num}: member before any 'H' header")
                classes[cur].append(parse_subspace(text, q))
    if n is None:
        raise MalformedPartition("no classes in file")
    return LinePartition(n, q, {h: tuple(ls) for h, ls in classes.items()})


def write_partition(path, om: LinePartition, header: str = "") -> None:
    with open(path, "w") as fh:
        for h in header.splitlines():
            fh.write(f"# {h}\n")
        for hyp in sorted(om.classes):
            fh.write(f"H {format_subspace(hyp)}\n")
            for l in sorted(om.classes[hyp]):
                fh.write(format_subspace(l) + "\n")


def partition_report(om: LinePartition) -> dict:
    try:
        problems = partition_problems(om)
    except MalformedPartition as e:
        return {"valid": False, "linear": None, "witness": str(e)}
    if problems:
        return {"valid": False, "linear": None, "witness": problems[0]}
    bad = find_nonlinear_pencil(om)
    if bad is None:
        return {"valid": True, "linear": True, "witness": None}
    return {"valid": True, "linear": False,
            "witness": {"vertex": format_subspace(bad.vertex), "carrier": format_subspace(bad.carrier),
                        "members": [format_subspace(m) for m in bad.members],
                        "images": [format_subspace(pi_omega(om, m)) for m in bad.members]}}
