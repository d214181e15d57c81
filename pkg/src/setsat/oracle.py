"""Brute-force satisfiability oracle over small hereditarily finite
universes.

Completely independent of the certificate machinery: candidate values are
subsets of a fixed finite universe, encoded as bitmasks, and atoms are
checked by bit arithmetic (with a final re-check under real set semantics
before a model is returned).  Exhaustive within its bounds, so "no model
found" only means "none within the configured universe".
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import ContractViolation, SizeLimit
from .formulas import (
    DiffA, Formula, NonEmpty, NormConj, ProdEq, UnionA, formula_vars,
)
from .hfset import EMPTY, HFSet
from .semantics import SetAssignment, eval_formula, eval_literal

_UNIVERSE_HARD_CAP = 200_000


@dataclass(frozen=True)
class OracleConfig:
    max_rank: int = 3
    universe_cap: int = 8
    var_cap: int = 3

    def __post_init__(self):
        if self.max_rank <= 0 or self.universe_cap <= 0 or self.var_cap <= 0:
            raise ValueError("oracle bounds must be positive")


def sets_of_rank_upto(rank: int) -> list[HFSet]:
    """Every hereditarily finite set of rank at most ``rank``, sorted."""
    if rank <= 0:
        return [EMPTY]
    prev = sets_of_rank_upto(rank - 1)
    if 2 ** len(prev) > _UNIVERSE_HARD_CAP:
        raise SizeLimit(f"too many sets of rank <= {rank} to enumerate")
    out = []
    for mask in range(2 ** len(prev)):
        out.append(HFSet(prev[i] for i in range(len(prev)) if mask >> i & 1))
    return sorted(out)


def first_sets_upto_rank(rank: int, count: int) -> list[HFSet]:
    """The ``count`` smallest sets of rank at most ``rank`` in canonical
    order, computed lazily by element-list length."""
    if count <= 0:
        return []
    elements = sets_of_rank_upto(rank - 1) if rank > 0 else []
    out = [EMPTY]
    for size in range(1, len(elements) + 1):
        if len(out) >= count:
            break
        for combo in combinations(elements, size):
            out.append(HFSet(combo))
            if len(out) >= count:
                break
    return out[:count]


def build_universe(cfg: OracleConfig) -> tuple[HFSet, ...]:
    """Candidate universe: the smallest ``universe_cap`` sets of bounded
    rank, closed once under unordered pair formation and cut back to the
    cap, so that small product witnesses stay representable."""
    base = first_sets_upto_rank(cfg.max_rank, cfg.universe_cap)
    closed = set(base)
    for i, u in enumerate(base):
        for v in base[i:]:
            closed.add(HFSet((u, v)))
    return tuple(sorted(closed)[: cfg.universe_cap])


class _MaskEvaluator:
    def __init__(self, universe: tuple[HFSet, ...]):
        self.universe = universe
        self.index = {u: i for i, u in enumerate(universe)}
        n = len(universe)
        self.pair_bit: list[list[int | None]] = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                bit = self.index.get(HFSet((universe[i], universe[j])))
                self.pair_bit[i][j] = bit
                self.pair_bit[j][i] = bit
        self._prod_cache: dict[tuple[int, int], tuple[int, bool]] = {}

    def product(self, my: int, mz: int) -> tuple[int, bool]:
        """(bitmask of in-universe pairs, whether every pair is in the
        universe)."""
        key = (my, mz) if my <= mz else (mz, my)
        cached = self._prod_cache.get(key)
        if cached is not None:
            return cached
        present = 0
        complete = True
        yi = [i for i in range(len(self.universe)) if my >> i & 1]
        zi = [i for i in range(len(self.universe)) if mz >> i & 1]
        for i in yi:
            row = self.pair_bit[i]
            for j in zi:
                bit = row[j]
                if bit is None:
                    complete = False
                else:
                    present |= 1 << bit
        self._prod_cache[key] = (present, complete)
        return present, complete

    def check(self, atom, masks: dict[str, int]) -> bool:
        if isinstance(atom, UnionA):
            return masks[atom.x] == masks[atom.y] | masks[atom.z]
        if isinstance(atom, DiffA):
            return masks[atom.x] == masks[atom.y] & ~masks[atom.z]
        if isinstance(atom, NonEmpty):
            return masks[atom.x] != 0
        present, complete = self.product(masks[atom.y], masks[atom.z])
        if isinstance(atom, ProdEq):
            return complete and masks[atom.x] == present
        return masks[atom.x] & ~present == 0  # ProdSub

    def define(self, atom, masks: dict[str, int]) -> int | None:
        """Value forced on atom.x by the other two operands, or None when no
        in-universe value exists."""
        if isinstance(atom, UnionA):
            return masks[atom.y] | masks[atom.z]
        if isinstance(atom, DiffA):
            return masks[atom.y] & ~masks[atom.z]
        present, complete = self.product(masks[atom.y], masks[atom.z])
        return present if complete else None

    def realize(self, mask: int) -> HFSet:
        return HFSet(
            self.universe[i] for i in range(len(self.universe)) if mask >> i & 1
        )


def _schedule(conj: NormConj) -> tuple[list, dict[int, list]]:
    """Interleave variable choices with forced definitions.

    Returns (events, checks) where an event is ("free", var) or
    ("def", atom) and checks[i] lists the atoms fully determined right
    after event i.
    """
    names = sorted(conj.vars)
    defs = [
        a for a in conj.atoms if isinstance(a, (UnionA, DiffA, ProdEq))
    ]

    def propagate(known: set[str], used: set[int]) -> list:
        fired = []
        progressed = True
        while progressed:
            progressed = False
            for pos, atom in enumerate(defs):
                if pos in used:
                    continue
                if atom.x not in known and atom.y in known and atom.z in known:
                    used.add(pos)
                    known.add(atom.x)
                    fired.append(atom)
                    progressed = True
        return fired

    def reach(known: frozenset[str], used: frozenset[int], extra: str) -> int:
        trial = set(known) | {extra}
        propagate(trial, set(used))
        return len(trial)

    known: set[str] = set()
    used_defs: set[int] = set()
    events: list = []
    while True:
        for atom in propagate(known, used_defs):
            events.append(("def", atom))
        remaining = [v for v in names if v not in known]
        if not remaining:
            break
        # enumerate the variable that unlocks the most definitions, so the
        # free search space stays as small as possible (ties: name order)
        chosen = max(
            remaining,
            key=lambda v: reach(frozenset(known), frozenset(used_defs), v),
        )
        events.append(("free", chosen))
        known.add(chosen)
    consumed = {
        pos
        for pos, atom in enumerate(conj.atoms)
        if any(atom is fired for kind, fired in events if kind == "def")
    }

    def vars_of(atom):
        if isinstance(atom, NonEmpty):
            return {atom.x}
        return {atom.x, atom.y, atom.z}

    # attach each remaining atom to the first event at which all of its
    # variables are known, so failing branches are cut as early as possible
    attach: dict[int, list] = {i: [] for i in range(len(events))}
    known = set()
    for i, event in enumerate(events):
        known.add(event[1].x if event[0] == "def" else event[1])
        for pos, atom in enumerate(conj.atoms):
            if pos in consumed:
                continue
            if vars_of(atom) <= known:
                attach[i].append(atom)
                consumed.add(pos)
    return events, attach


def oracle_search(
    conj: NormConj, cfg: OracleConfig | None = None
) -> SetAssignment | None:
    """First assignment (in canonical enumeration order) of universe
    subsets to the conjunction's variables that satisfies every atom, or
    None when no such assignment exists within the bounds."""
    cfg = cfg or OracleConfig()
    names = sorted(conj.vars)
    if len(names) > cfg.var_cap:
        raise SizeLimit(
            f"{len(names)} variables exceed the oracle cap {cfg.var_cap}"
        )
    universe = build_universe(cfg)
    ev = _MaskEvaluator(universe)
    events, attach = _schedule(conj)
    space = 1 << len(universe)
    masks: dict[str, int] = {}

    def run(i: int) -> bool:
        if i == len(events):
            return True
        kind, payload = events[i]
        if kind == "def":
            value = ev.define(payload, masks)
            if value is None:
                return False
            masks[payload.x] = value
            if all(ev.check(a, masks) for a in attach[i]) and run(i + 1):
                return True
            del masks[payload.x]
            return False
        for mask in range(space):
            masks[payload] = mask
            if all(ev.check(a, masks) for a in attach[i]) and run(i + 1):
                return True
        del masks[payload]
        return False

    if not run(0):
        return None
    model = {v: ev.realize(masks[v]) for v in names}
    for atom in conj.atoms:
        if not eval_literal(model, atom):
            raise ContractViolation(
                f"oracle mask semantics disagree with set semantics on {atom}"
            )
    return model


def oracle_search_formula(
    formula: Formula, cfg: OracleConfig | None = None
) -> SetAssignment | None:
    """Plain exhaustive search at the formula level (no propagation); used
    to cross-check normalization."""
    cfg = cfg or OracleConfig()
    names = sorted(formula_vars(formula))
    if len(names) > cfg.var_cap:
        raise SizeLimit(
            f"{len(names)} variables exceed the oracle cap {cfg.var_cap}"
        )
    universe = build_universe(cfg)
    ev = _MaskEvaluator(universe)
    space = 1 << len(universe)
    masks = [0] * len(names)

    def run(i: int) -> SetAssignment | None:
        if i == len(names):
            model = {v: ev.realize(masks[j]) for j, v in enumerate(names)}
            return model if eval_formula(model, formula) else None
        for mask in range(space):
            masks[i] = mask
            found = run(i + 1)
            if found is not None:
                return found
        return None

    return run(0)
