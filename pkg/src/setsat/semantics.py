"""Set assignments, literal evaluation, and Venn partitions.

A set assignment is a plain dict mapping variable names to HFSet values.
Everything here is pure; partitions and assignments are value objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Hashable, Mapping

from .errors import UnboundVariable
from .formulas import (
    Atom, AtomF, And, Diff, DiffA, Empty, Eq, Expr, Formula, Implies, Inter,
    Neq, NonEmpty, Not, NormAtom, NotSub, Or, Prod, ProdEq, ProdSub, Sub,
    Union, UnionA, Var,
)
from .hfset import EMPTY, HFSet, otimes

SetAssignment = dict[str, HFSet]


def _lookup(assignment: Mapping[str, HFSet], name: str) -> HFSet:
    try:
        return assignment[name]
    except KeyError:
        raise UnboundVariable(f"variable {name!r} is not assigned") from None


def eval_literal(assignment: Mapping[str, HFSet], atom: NormAtom) -> bool:
    """Truth of a normalized atom under real set semantics."""
    if isinstance(atom, UnionA):
        return _lookup(assignment, atom.x) == _lookup(assignment, atom.y).union(
            _lookup(assignment, atom.z)
        )
    if isinstance(atom, DiffA):
        return _lookup(assignment, atom.x) == _lookup(assignment, atom.y).diff(
            _lookup(assignment, atom.z)
        )
    if isinstance(atom, ProdEq):
        return _lookup(assignment, atom.x) == otimes(
            _lookup(assignment, atom.y), _lookup(assignment, atom.z)
        )
    if isinstance(atom, ProdSub):
        return _lookup(assignment, atom.x).issubset(
            otimes(_lookup(assignment, atom.y), _lookup(assignment, atom.z))
        )
    if isinstance(atom, NonEmpty):
        return not _lookup(assignment, atom.x).is_empty()
    raise TypeError(f"not a normalized atom: {atom!r}")


def eval_expr(assignment: Mapping[str, HFSet], e: Expr) -> HFSet:
    if isinstance(e, Var):
        return _lookup(assignment, e.name)
    if isinstance(e, Empty):
        return EMPTY
    left = eval_expr(assignment, e.left)
    right = eval_expr(assignment, e.right)
    if isinstance(e, Union):
        return left.union(right)
    if isinstance(e, Inter):
        return left.inter(right)
    if isinstance(e, Diff):
        return left.diff(right)
    if isinstance(e, Prod):
        return otimes(left, right)
    raise TypeError(f"not an expression: {e!r}")


def eval_atom(assignment: Mapping[str, HFSet], a: Atom) -> bool:
    left = eval_expr(assignment, a.left)
    right = eval_expr(assignment, a.right)
    if isinstance(a, Eq):
        return left == right
    if isinstance(a, Neq):
        return left != right
    if isinstance(a, Sub):
        return left.issubset(right)
    if isinstance(a, NotSub):
        return not left.issubset(right)
    raise TypeError(f"not an atom: {a!r}")


def eval_formula(assignment: Mapping[str, HFSet], f: Formula) -> bool:
    if isinstance(f, AtomF):
        return eval_atom(assignment, f.atom)
    if isinstance(f, Not):
        return not eval_formula(assignment, f.inner)
    if isinstance(f, And):
        return eval_formula(assignment, f.left) and eval_formula(assignment, f.right)
    if isinstance(f, Or):
        return eval_formula(assignment, f.left) or eval_formula(assignment, f.right)
    if isinstance(f, Implies):
        return (not eval_formula(assignment, f.left)) or eval_formula(
            assignment, f.right
        )
    raise TypeError(f"not a formula: {f!r}")


def assignment_rank(assignment: Mapping[str, HFSet]) -> int:
    """Largest rank among the elements of the assignment's set domain
    (0 when every value is empty)."""
    best = 0
    for value in assignment.values():
        for element in value:
            if element.rank > best:
                best = element.rank
    return best


# --- partitions ---

@dataclass(frozen=True)
class Partition:
    """Pairwise disjoint nonempty blocks, kept in canonical order."""

    blocks: tuple[HFSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(sorted(self.blocks)))
        seen: set[HFSet] = set()
        for block in self.blocks:
            if block.is_empty():
                raise ValueError("partition blocks must be nonempty")
            for element in block:
                if element in seen:
                    raise ValueError("partition blocks must be disjoint")
                seen.add(element)

    @property
    def domain(self) -> frozenset[HFSet]:
        return frozenset(e for block in self.blocks for e in block)


@dataclass(frozen=True)
class PartitionAssignment:
    """A partition together with a map from variables to sets of block
    indices; induces the assignment v -> union of its blocks."""

    partition: Partition
    vars: frozenset[str]
    imap: Mapping[str, frozenset[int]]

    def __post_init__(self):
        n = len(self.partition.blocks)
        for v, ids in self.imap.items():
            if v not in self.vars:
                raise ValueError(f"imap names unknown variable {v!r}")
            if any(i < 0 or i >= n for i in ids):
                raise ValueError(f"imap for {v!r} references missing blocks")

    def induced_assignment(self) -> SetAssignment:
        out: SetAssignment = {}
        for v in self.vars:
            ids = self.imap.get(v, frozenset())
            elements = [
                e for i in sorted(ids) for e in self.partition.blocks[i]
            ]
            out[v] = HFSet(elements)
        return out

    def signature_of(self, block_index: int) -> frozenset[str]:
        return frozenset(
            v for v, ids in self.imap.items() if block_index in ids
        )


def venn_of(assignment: Mapping[str, HFSet]) -> tuple[Partition, PartitionAssignment]:
    """The Venn partition induced by an assignment: one block per nonempty
    region, where a region is the set of elements lying in exactly the
    values of one particular subset of the variables.

    The induced assignment of the returned PartitionAssignment reproduces
    the input exactly.
    """
    regions: dict[frozenset[str], list[HFSet]] = {}
    names = sorted(assignment)
    universe = sorted({e for v in names for e in assignment[v]})
    for element in universe:
        signature = frozenset(v for v in names if element in assignment[v])
        regions.setdefault(signature, []).append(element)
    blocks = sorted(HFSet(elements) for elements in regions.values())
    index_of = {block: i for i, block in enumerate(blocks)}
    sig_by_index: dict[int, frozenset[str]] = {}
    for signature, elements in regions.items():
        sig_by_index[index_of[HFSet(elements)]] = signature
    imap = {
        v: frozenset(
            i for i, sig in sig_by_index.items() if v in sig
        )
        for v in names
    }
    partition = Partition(tuple(blocks))
    return partition, PartitionAssignment(partition, frozenset(names), imap)


def check_boolean_on_signatures(
    imap: Mapping[str, AbstractSet[Hashable]], atom: NormAtom
) -> bool:
    """Truth of a union/difference/nonemptiness atom read off the
    place-id sets alone, without touching block contents."""
    if isinstance(atom, UnionA):
        return frozenset(imap[atom.x]) == frozenset(imap[atom.y]) | frozenset(
            imap[atom.z]
        )
    if isinstance(atom, DiffA):
        return frozenset(imap[atom.x]) == frozenset(imap[atom.y]) - frozenset(
            imap[atom.z]
        )
    if isinstance(atom, NonEmpty):
        return bool(imap[atom.x])
    raise TypeError(f"signature check only covers boolean atoms, got {atom!r}")


# --- JSON codecs ---

def assignment_to_json(assignment: Mapping[str, HFSet]) -> dict:
    return {"vars": {v: assignment[v].to_lists() for v in sorted(assignment)}}


def assignment_from_json(data: dict) -> SetAssignment:
    if not isinstance(data, dict) or "vars" not in data:
        raise ValueError('model JSON must be an object with a "vars" key')
    out: SetAssignment = {}
    for name, encoded in data["vars"].items():
        out[name] = HFSet.from_lists(encoded)
    return out


def partition_to_json(pa: PartitionAssignment) -> list[dict]:
    out = []
    for i, block in enumerate(pa.partition.blocks):
        out.append(
            {
                "signature": sorted(pa.signature_of(i)),
                "block": [e.to_lists() for e in block],
            }
        )
    return out
