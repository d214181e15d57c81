"""Canonical hereditarily finite sets.

An ``HFSet`` is a finite set whose elements are themselves hereditarily
finite.  Values are interned and kept in a canonical form (elements sorted,
duplicates removed), so structural equality is pointer equality and the
total order below is cheap.

The order is length-lexicographic: shorter element lists come first, ties
are broken by comparing the element lists lexicographically (recursively).
This makes every construction in the package reproducible bit for bit.
"""

from __future__ import annotations

import json
from itertools import combinations
from typing import Iterable, Iterator

from .errors import BadRank, SizeLimit

# A family is a finite set of HFSets (the operand of the intersecting
# power-set operators, and the block collection of a partition).
HFFamily = frozenset["HFSet"]


class HFSet:
    """An immutable, interned, canonically ordered hereditarily finite set."""

    __slots__ = ("elements", "rank", "_key", "_hash", "_elset")

    _pool: dict[tuple, "HFSet"] = {}

    elements: tuple["HFSet", ...]
    rank: int

    def __new__(cls, elements: Iterable["HFSet"] = ()) -> "HFSet":
        elems = sorted(set(elements))
        key = (len(elems), tuple(e._key for e in elems))
        cached = cls._pool.get(key)
        if cached is not None:
            return cached
        inst = super().__new__(cls)
        object.__setattr__(inst, "elements", tuple(elems))
        object.__setattr__(inst, "rank", 1 + max((e.rank for e in elems), default=-1))
        object.__setattr__(inst, "_key", key)
        object.__setattr__(inst, "_hash", hash(key))
        object.__setattr__(inst, "_elset", frozenset(elems))
        cls._pool[key] = inst
        return inst

    def __setattr__(self, name, value):  # pragma: no cover - guards immutability
        raise AttributeError("HFSet is immutable")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator["HFSet"]:
        return iter(self.elements)

    def __contains__(self, item: "HFSet") -> bool:
        return item in self._elset

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, HFSet) and self._key == other._key

    def __lt__(self, other: "HFSet") -> bool:
        return self._key < other._key

    def __le__(self, other: "HFSet") -> bool:
        return self._key <= other._key

    def __gt__(self, other: "HFSet") -> bool:
        return self._key > other._key

    def __ge__(self, other: "HFSet") -> bool:
        return self._key >= other._key

    def __repr__(self) -> str:
        return f"HFSet({self.to_lists()!r})"

    def is_empty(self) -> bool:
        return not self.elements

    def union(self, other: "HFSet") -> "HFSet":
        return HFSet(self.elements + other.elements)

    def inter(self, other: "HFSet") -> "HFSet":
        return HFSet(self._elset & other._elset)

    def diff(self, other: "HFSet") -> "HFSet":
        return HFSet(self._elset - other._elset)

    def issubset(self, other: "HFSet") -> bool:
        return self._elset <= other._elset

    def to_lists(self):
        """Nested-list encoding: [] is the empty set, elements in canonical
        order.  This is the JSON/text interchange form."""
        return [e.to_lists() for e in self.elements]

    @classmethod
    def from_lists(cls, data) -> "HFSet":
        if not isinstance(data, (list, tuple)):
            raise ValueError(f"HFSet encoding must be nested lists, got {data!r}")
        return cls(cls.from_lists(item) for item in data)

    @classmethod
    def from_text(cls, text: str) -> "HFSet":
        return cls.from_lists(json.loads(text))

    def to_text(self) -> str:
        return json.dumps(self.to_lists(), separators=(",", ","))


EMPTY = HFSet()


def hf(*elements: HFSet) -> HFSet:
    return HFSet(elements)


def otimes(s: HFSet, t: HFSet) -> HFSet:
    """Unordered Cartesian product: all sets {u, u'} with u in s, u' in t.

    When u == u' the two-element set collapses to a singleton, so the result
    mixes singletons and doubletons.
    """
    return HFSet(HFSet((u, v)) for u in s for v in t)


def pow_star(family: Iterable[HFSet], cap: int = 20) -> HFFamily:
    """Subsets of the union of ``family`` that meet every member.

    Exponential in the union size; refuses unions larger than ``cap``.
    """
    members = list(frozenset(family))
    universe = sorted({e for s in members for e in s})
    if len(universe) > cap:
        raise SizeLimit(
            f"pow_star universe has {len(universe)} elements (cap {cap})"
        )
    out = []
    for r in range(len(universe) + 1):
        for combo in combinations(universe, r):
            chosen = frozenset(combo)
            if all(chosen & s._elset for s in members):
                out.append(HFSet(combo))
    return frozenset(out)


def pow_star_le2(family: Iterable[HFSet]) -> HFFamily:
    """Members of pow_star of cardinality 1 or 2; quadratic, never capped."""
    members = list(frozenset(family))
    universe = sorted({e for s in members for e in s})
    out = []
    for i, u in enumerate(universe):
        if all(u in s for s in members):
            out.append(HFSet((u,)))
        for v in universe[i + 1:]:
            pair = frozenset((u, v))
            if all(pair & s._elset for s in members):
                out.append(HFSet((u, v)))
    return frozenset(out)


def pow_star_gt2(family: Iterable[HFSet], cap: int = 20) -> HFFamily:
    """Members of pow_star of cardinality strictly greater than 2."""
    return frozenset(t for t in pow_star(family, cap=cap) if len(t) > 2)


def von_neumann(n: int) -> HFSet:
    """The finite von Neumann ordinal n = {0, 1, ..., n-1}."""
    if n < 0:
        raise ValueError("ordinal index must be nonnegative")
    current = EMPTY
    for _ in range(n):
        current = HFSet(current.elements + (current,))
    return current


def ack(n: int) -> HFSet:
    """Ackermann decoding of a natural number into an HF set.

    Element i of the result is ack(i) for every set bit i of n, which makes
    the map injective.
    """
    if n < 0:
        raise ValueError("index must be nonnegative")
    elems = []
    i = 0
    while n:
        if n & 1:
            elems.append(ack(i))
        n >>= 1
        i += 1
    return HFSet(elems)


def max_ack_rank(count: int) -> int:
    """Largest rank of ack(i) over 0 <= i < count.

    rank(ack(i)) <= r holds exactly when i < tower(r) where tower(0) = 1 and
    tower(r+1) = 2 ** tower(r), so this is a short tower search.
    """
    if count <= 0:
        return 0
    r = 0
    tower = 1
    while tower < count:
        r += 1
        tower = 2 ** tower
    return r


def atom_of_rank(index: int, height: int) -> HFSet:
    """The index-th disposable "atom" of rank exactly ``height``.

    Encoded as {von_neumann(height-1), ack(index)}: the ordinal pins the
    rank, the Ackermann component makes distinct indices distinct.  Requires
    height >= rank(ack(index)) + 2 so the ordinal strictly dominates.
    """
    marker = ack(index)
    if height < marker.rank + 2:
        raise BadRank(
            f"atom rank {height} too small for index {index} "
            f"(needs at least {marker.rank + 2})"
        )
    return HFSet((von_neumann(height - 1), marker))


def min_atom_rank(count: int) -> int:
    """Smallest height H such that atom_of_rank(i, H) is defined for all
    i < count."""
    return max_ack_rank(count) + 2
