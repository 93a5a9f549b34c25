"""Base spaces with explicit neighborhood structure.

Two flavors are supported: finite spaces given by an explicit basis of
opens, and two builtin countably-based spaces (a single point, and the
rationals with the order topology). Tying conditions elsewhere only ever
quantify over the basic opens exposed here, so every basic open has a
finite description.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, count, islice
from typing import Iterable, Iterator, Union

from .errors import InputError, Violation
from .rationals import cantor_unpair, nth_rational

PointId = Union[str, Fraction]


@dataclass(frozen=True)
class BasePoint:
    """A point of the base space, identified by an opaque token."""

    id: PointId


# A basic open of a finite base: the sorted tuple of member point ids.
# Canonical form makes set equality plain tuple equality.
FiniteOpen = tuple


@dataclass(frozen=True)
class RationalInterval:
    """Basic open of the rational order topology: endpoints exact, open."""

    lo: Fraction
    hi: Fraction

    def contains_id(self, pid: PointId) -> bool:
        return isinstance(pid, Fraction) and self.lo < pid < self.hi


@dataclass(frozen=True)
class FiniteBase:
    """A finite space with an explicit basis of opens."""

    points: tuple[BasePoint, ...]
    basis: tuple[FiniteOpen, ...]

    @classmethod
    def of(
        cls,
        point_ids: Iterable[PointId],
        basis_sets: Iterable[Iterable[PointId]],
    ) -> "FiniteBase":
        ids = list(point_ids)
        if len(set(ids)) != len(ids):
            raise InputError("duplicate point ids in base space")
        known = set(ids)
        canon: list[FiniteOpen] = []
        for raw in basis_sets:
            members = tuple(sorted(set(raw)))
            for pid in members:
                if pid not in known:
                    raise InputError(f"basis set references unknown point {pid!r}")
            if members not in canon:
                canon.append(members)
        return cls(tuple(BasePoint(i) for i in ids), tuple(canon))

    def point_ids(self) -> tuple[PointId, ...]:
        return tuple(p.id for p in self.points)

    def contains_point(self, y: BasePoint) -> bool:
        return any(p == y for p in self.points)

    def neighborhood_basis(self, y: BasePoint) -> list[FiniteOpen]:
        if not self.contains_point(y):
            raise InputError(f"unknown base point {y.id!r}")
        return [o for o in self.basis if y.id in o]


@dataclass(frozen=True)
class EnumeratedBase:
    """A builtin countably-based space with an indexed stream of basic opens."""

    kind: str  # "one_point" | "rational_order"
    point: BasePoint | None = None

    @classmethod
    def one_point(cls, point_id: PointId = "pt") -> "EnumeratedBase":
        return cls("one_point", BasePoint(point_id))

    @classmethod
    def rational_order(cls) -> "EnumeratedBase":
        return cls("rational_order")

    def contains_point(self, y: BasePoint) -> bool:
        if self.kind == "one_point":
            return y == self.point
        return isinstance(y.id, Fraction)

    def basic_open(self, k: int):
        """The k-th basic open of the fixed enumeration."""
        if k < 0:
            raise InputError("basic-open index starts at 0")
        if self.kind == "one_point":
            return (self.point.id,)
        i, j = cantor_unpair(k)
        center = nth_rational(i)
        radius = Fraction(1, j + 1)
        return RationalInterval(center - radius, center + radius)

    def open_contains(self, basic_open, y: BasePoint) -> bool:
        if self.kind == "one_point":
            return basic_open == (self.point.id,) and y == self.point
        if not isinstance(basic_open, RationalInterval):
            raise InputError("expected a rational interval as basic open")
        return basic_open.contains_id(y.id)

    def neighborhood_basis(self, y: BasePoint) -> Iterator:
        if not self.contains_point(y):
            raise InputError(f"point {y.id!r} does not belong to this base")
        if self.kind == "one_point":
            return iter([(self.point.id,)])

        def stream() -> Iterator[RationalInterval]:
            for k in count():
                o = self.basic_open(k)
                if o.contains_id(y.id):
                    yield o

        return stream()


Base = Union[FiniteBase, EnumeratedBase]


def open_contains(base: Base, basic_open, y: BasePoint) -> bool:
    """Membership of a base point in a basic open, any base flavor."""
    if isinstance(base, FiniteBase):
        return y.id in basic_open
    return base.open_contains(basic_open, y)


def describe_open(basic_open) -> str:
    if isinstance(basic_open, RationalInterval):
        return f"({basic_open.lo},{basic_open.hi})"
    return "{" + ",".join(str(i) for i in basic_open) + "}"


def validate_basis(b: FiniteBase) -> list[Violation]:
    """Check the two basis axioms; an empty report means the basis is valid.

    Covering: every point lies in some basis set. Refinement: whenever a
    point sits in the intersection of two basis sets, some basis set fits
    between the point and that intersection.
    """
    ids = b.point_ids()
    if len(set(ids)) != len(ids):
        raise InputError("duplicate point ids in base space")
    violations: list[Violation] = []
    covered = set()
    for o in b.basis:
        covered.update(o)
    for pid in ids:
        if pid not in covered:
            violations.append(
                Violation("cover", f"point {pid!r} lies in no basis set", (pid,))
            )
    for o1, o2 in combinations(b.basis, 2):
        meet = set(o1) & set(o2)
        for pid in sorted(meet):
            if not any(pid in o3 and set(o3) <= meet for o3 in b.basis):
                violations.append(
                    Violation(
                        "intersection",
                        f"no basis set contains {pid!r} inside "
                        f"{describe_open(o1)} & {describe_open(o2)}",
                        (pid, o1, o2),
                    )
                )
    return violations


def neighborhood_basis(b: Base, y: BasePoint, limit: int | None = None):
    """Basic opens containing ``y``: a list for finite bases, else a stream.

    For an enumerated base, pass ``limit`` to truncate the stream.
    """
    if isinstance(b, FiniteBase):
        return b.neighborhood_basis(y)
    stream = b.neighborhood_basis(y)
    if limit is None:
        return stream
    return list(islice(stream, limit))


def all_opens_finite(b: FiniteBase) -> frozenset:
    """Every open of the finite base: all unions of basis sets, plus the
    empty set, each in canonical sorted-tuple form."""
    generators = [frozenset(o) for o in b.basis]
    known = {frozenset()} | set(generators)
    changed = True
    while changed:
        changed = False
        for o in list(known):
            for g in generators:
                u = o | g
                if u not in known:
                    known.add(u)
                    changed = True
    return frozenset(tuple(sorted(o)) for o in known)
