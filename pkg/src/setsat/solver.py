"""Decision procedure for normalized conjunctions.

The satisfiability search enumerates place certificates: a certificate fixes
the set of Venn signatures that are nonempty, which places carry product
content, how pair content is distributed (the graph edges), and which nodes
are saturated.  Certificates are verified by pure bookkeeping on signature
sets in polynomial time; a verifying certificate without a saturation cycle
is turned into an explicit finite model, while one whose every verifying
variant has a cycle witnesses that only infinite models exist.

Enumeration is organized around one canonical certificate per candidate
place set: boolean atoms filter the admissible signatures (the unit
propagation step), product labels and saturation flags are exactly the
forced ones, and edges are the maximal admissible set.  Any verifying
certificate over a place set verifies with maximal edges too, so this is
complete; when the maximal certificate verifies but is cyclic, a bounded
second pass searches smaller target sets for the saturated nodes, since
cycles run through saturated nodes only.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from .errors import (
    BudgetExhausted, ContractViolation, SizeLimit,
)
from .formulas import (
    DiffA, Formula, NonEmpty, NormAtom, NormConj, ProdEq, ProdSub, UnionA,
    formula_vars, normalize_formula, parse_formula,
)
from .hfset import EMPTY, HFSet, atom_of_rank, min_atom_rank
from .semantics import (
    Partition, SetAssignment, assignment_rank, assignment_to_json,
    eval_literal, venn_of,
)
from .tgraph import (
    Node, TGraph, detect_saturation_cycle, format_node, format_place,
    induce_from_partition, node_of, population_closure, population_layers,
    sort_places, weak_isomorphic, _sorted_nodes,
)

Sig = frozenset  # frozenset[str]


@dataclass
class SolverLimits:
    """Every bound the solver may hit, overridable from the CLI."""

    max_vars: int = 10
    dnf_cap: int = 4096
    element_budget: int = 200_000
    saturation_budget: int = 20_000
    iso_cap: int = 12
    refine_cap: int = 4096
    certificate_cap: int = 200_000


@dataclass(frozen=True)
class PlaceCertificate:
    """The polynomially verifiable witness: nonempty Venn signatures plus
    the graph over them.  The variable-to-places map is always derived from
    the signatures, never stored."""

    places: tuple[Sig, ...]
    graph: TGraph

    def __post_init__(self):
        if len(set(self.places)) != len(self.places):
            raise ValueError("duplicate place signatures")
        if any(not s for s in self.places):
            raise ValueError("place signatures must be nonempty")
        if frozenset(self.places) != self.graph.places:
            raise ValueError("graph places do not match the signature list")

    def imap(self, variables: Iterable[str]) -> dict[str, frozenset]:
        return {
            v: frozenset(s for s in self.places if v in s) for v in variables
        }


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class BuilderPlan:
    """Shape of a model construction: places grouped by the closure step at
    which they first receive content, the longest repetition-free path
    through distribution arrows (k), and the chosen disposable-atom rank."""

    layers: tuple[frozenset, ...]
    k: int
    place_count: int
    atom_rank: int
    base_charge: int
    max_out_degree: int

    def __post_init__(self):
        if self.k < len(self.layers) - 1:
            raise ContractViolation(
                f"path length {self.k} shorter than layer count "
                f"{len(self.layers) - 1}"
            )


@dataclass(frozen=True)
class Verdict:
    status: str  # "unsat" | "sat-finite" | "sat-infinite-only"
    model: SetAssignment | None = None
    certificate: PlaceCertificate | None = None
    cycle: list | None = None

    def is_sat(self) -> bool:
        return self.status != "unsat"


# --- signature filtering (unit propagation from boolean atoms) ---

def _sig_admits(sig: Sig, atom: NormAtom) -> bool:
    if isinstance(atom, UnionA):
        return (atom.x in sig) == (atom.y in sig or atom.z in sig)
    if isinstance(atom, DiffA):
        return (atom.x in sig) == (atom.y in sig and atom.z not in sig)
    return True


def allowed_signatures(conj: NormConj) -> list[Sig]:
    """Nonempty variable subsets consistent with every boolean atom.

    Any set of places of any model uses only these signatures, and any
    subset of them automatically satisfies the boolean atoms place-wise.
    """
    names = sorted(conj.vars)
    out = []
    for r in range(1, len(names) + 1):
        for combo in combinations(names, r):
            sig = frozenset(combo)
            if all(_sig_admits(sig, a) for a in conj.atoms):
                out.append(sig)
    return sort_places(out)


# --- canonical certificate over a fixed place set ---

def _splits(node: Node, left: frozenset, right: frozenset) -> bool:
    members = list(node)
    if len(members) == 1:
        return members[0] in left and members[0] in right
    a, b = members
    return (a in left and b in right) or (b in left and a in right)


def _prod_atoms(conj: NormConj) -> list[tuple[bool, str, str, str]]:
    return [
        (isinstance(a, ProdEq), a.x, a.y, a.z)
        for a in conj.atoms
        if isinstance(a, (ProdEq, ProdSub))
    ]


def canonical_certificate(
    conj: NormConj, sigs: Sequence[Sig]
) -> PlaceCertificate:
    """The maximal-edge certificate over ``sigs``: product labels and
    saturation flags exactly as forced by the product atoms, and every edge
    the verification conditions admit."""
    places = sort_places(frozenset(sigs))
    imap = {v: frozenset(s for s in places if v in s) for v in conj.vars}
    prods = _prod_atoms(conj)

    forced: set = set()
    flagged: set = set()
    for is_eq, x, y, z in prods:
        forced.update(imap[x])
        if is_eq:
            for a in imap[y]:
                for b in imap[z]:
                    flagged.add(node_of(a, b))

    def admissible(node: Node, place: Sig) -> bool:
        for is_eq, x, y, z in prods:
            if place in imap[x] and not _splits(node, imap[y], imap[z]):
                return False
            if is_eq and _splits(node, imap[y], imap[z]) and place not in imap[x]:
                return False
        return True

    targets: dict[Node, frozenset] = {}
    for i, a in enumerate(places):
        for b in places[i:]:
            node = node_of(a, b)
            tgts = frozenset(p for p in forced if admissible(node, p))
            if tgts:
                targets[node] = tgts

    graph = TGraph(
        places=frozenset(places),
        otimes_places=frozenset(forced),
        targets=targets,
        saturated=frozenset(flagged),
    )
    return PlaceCertificate(tuple(places), graph)


# --- certificate verification ---

def verify_certificate(conj: NormConj, cert: PlaceCertificate) -> VerifyResult:
    """Polynomial check that the certificate supports a model of ``conj``.

    Works purely on place identities; block contents are never touched.
    """
    imap = cert.imap(conj.vars)
    graph = cert.graph
    incoming = graph.in_edges()

    for atom in conj.atoms:
        if isinstance(atom, (ProdEq, ProdSub)):
            continue
        if isinstance(atom, NonEmpty):
            if not imap[atom.x]:
                return VerifyResult(False, f"(1) {atom.x} has no place")
            continue
        if not _boolean_holds(atom, imap):
            return VerifyResult(False, f"(1) boolean atom {atom} fails on signatures")

    prods = _prod_atoms(conj)
    for is_eq, x, y, z in prods:
        for place in imap[x]:
            if place not in graph.otimes_places:
                return VerifyResult(
                    False,
                    f"(2) place {format_place(place)} of {x} is not a product place",
                )
            edges = incoming[place]
            if not edges:
                return VerifyResult(
                    False, f"(2) product place {format_place(place)} has no source"
                )
            for node in edges:
                if not _splits(node, imap[y], imap[z]):
                    return VerifyResult(
                        False,
                        f"(2) edge {format_node(node)} -> {format_place(place)} "
                        f"does not split into {y}/{z}",
                    )
        if is_eq:
            for a in imap[y]:
                for b in imap[z]:
                    node = node_of(a, b)
                    if node not in graph.saturated:
                        return VerifyResult(
                            False, f"(3) node {format_node(node)} is not saturated"
                        )
                    tgts = graph.targets.get(node, frozenset())
                    if not tgts:
                        return VerifyResult(
                            False,
                            f"(3) saturated node {format_node(node)} has no targets",
                        )
                    if not tgts <= imap[x]:
                        return VerifyResult(
                            False,
                            f"(3) node {format_node(node)} leaks outside {x}",
                        )

    for place in graph.otimes_places:
        if not incoming[place]:
            return VerifyResult(
                False, f"(4) product place {format_place(place)} has no source"
            )

    _, all_populated = population_closure(graph)
    if not all_populated:
        return VerifyResult(False, "(5) some place is unreachable from a seed")
    return VerifyResult(True)


def _boolean_holds(atom: NormAtom, imap: Mapping[str, frozenset]) -> bool:
    if isinstance(atom, UnionA):
        return imap[atom.x] == imap[atom.y] | imap[atom.z]
    return imap[atom.x] == imap[atom.y] - imap[atom.z]  # DiffA


# --- search ---

def search(conj: NormConj, limits: SolverLimits | None = None) -> Verdict:
    """Complete enumeration of the certificate space for ``conj``.

    Returns sat-finite with a checked model as soon as some verifying
    certificate is saturation-acyclic, sat-infinite-only with the first
    (minimal-place) verifying certificate when all of them are cyclic, and
    unsat when none verifies.  Deterministic for a given conjunction.
    """
    limits = limits or SolverLimits()
    if len(conj.vars) > limits.max_vars:
        raise SizeLimit(
            f"{len(conj.vars)} variables exceed the configured maximum "
            f"{limits.max_vars}"
        )

    sigs = allowed_signatures(conj)
    need_nonempty = {a.x for a in conj.atoms if isinstance(a, NonEmpty)}
    # a variable that must be nonempty but appears in no admissible
    # signature can never get a place, whatever the subset
    if any(all(v not in s for s in sigs) for v in need_nonempty):
        return Verdict("unsat")
    first_cyclic: tuple[PlaceCertificate, list] | None = None
    examined = 0

    for r in range(len(sigs) + 1):
        for combo in combinations(sigs, r):
            # an unsat or infinite-only verdict needs the whole space, so
            # the exponential blowup must fail loudly rather than hang
            examined += 1
            if examined > limits.certificate_cap:
                raise SizeLimit(
                    f"certificate space exceeds {limits.certificate_cap} "
                    f"candidates ({len(sigs)} admissible signatures)"
                )
            if any(all(v not in s for s in combo) for v in need_nonempty):
                continue
            cert = canonical_certificate(conj, combo)
            if not verify_certificate(conj, cert):
                continue
            cycle = detect_saturation_cycle(cert.graph)
            if cycle is None:
                model = build_model(conj, cert, limits)
                return Verdict("sat-finite", model=model, certificate=cert)
            if first_cyclic is None:
                first_cyclic = (cert, cycle)
            refined = _refine_acyclic(conj, cert, limits)
            if refined is not None:
                model = build_model(conj, refined, limits)
                return Verdict("sat-finite", model=model, certificate=refined)

    if first_cyclic is not None:
        cert, cycle = first_cyclic
        return Verdict("sat-infinite-only", certificate=cert, cycle=cycle)
    return Verdict("unsat")


def _refine_acyclic(
    conj: NormConj, cert: PlaceCertificate, limits: SolverLimits
) -> PlaceCertificate | None:
    """Search smaller target sets for the saturated nodes of a verifying but
    cyclic certificate.  Cycles pass through saturated nodes only, so edges
    of unsaturated nodes stay maximal."""
    graph = cert.graph
    flagged = _sorted_nodes(graph.saturated)
    if not flagged:
        return None
    options: list[list[frozenset]] = []
    total = 1
    for node in flagged:
        tgts = sort_places(graph.targets.get(node, frozenset()))
        subsets = []
        for r in range(len(tgts) - 1, 0, -1):  # maximal choice already failed
            subsets.extend(frozenset(c) for c in combinations(tgts, r))
        if not subsets:
            return None
        options.append(subsets)
        total *= len(subsets) + 1
        if total > limits.refine_cap:
            return None

    full = [graph.targets.get(node, frozenset()) for node in flagged]
    for choice in product(*(([f] + o) for f, o in zip(full, options))):
        if all(c == f for c, f in zip(choice, full)):
            continue
        targets = {
            node: tgts
            for node, tgts in graph.targets.items()
            if node not in graph.saturated
        }
        for node, tgts in zip(flagged, choice):
            targets[node] = tgts
        trimmed = TGraph(
            graph.places, graph.otimes_places, targets, graph.saturated
        )
        if detect_saturation_cycle(trimmed) is not None:
            continue
        candidate = PlaceCertificate(cert.places, trimmed)
        if verify_certificate(conj, candidate):
            return candidate
    return None


# --- model construction ---

def _pair_space_size(blocks: Mapping, node: Node) -> int:
    sizes = [len(blocks[m]) for m in node]
    if len(sizes) == 1:
        return sizes[0] * (sizes[0] + 1) // 2
    return sizes[0] * sizes[1]


def _pairs_over(blocks: Mapping, node: Node) -> list[HFSet]:
    """All one/two-element sets meeting every member block of ``node``,
    drawn from those blocks; canonical order."""
    members = sort_places(node)
    if len(members) == 1:
        items = sorted(blocks[members[0]])
        out = [HFSet((u,)) for u in items]
        out.extend(
            HFSet((u, v))
            for i, u in enumerate(items)
            for v in items[i + 1:]
        )
    else:
        left = sorted(blocks[members[0]])
        right = sorted(blocks[members[1]])
        out = [HFSet((u, v)) for u in left for v in right]
    return sorted(set(out))


def _longest_otimes_path(graph: TGraph) -> int:
    """Longest repetition-free place-to-place path along distribution
    arrows.  Exact for small graphs, otherwise the safe upper bound given by
    the number of product places."""
    if len(graph.places) > 16:
        return len(graph.otimes_places)
    succ: dict = {p: set() for p in graph.places}
    for node, tgts in graph.targets.items():
        for member in node:
            succ[member].update(tgts)
    best = 0

    def walk(place, seen: set, depth: int):
        nonlocal best
        if depth > best:
            best = depth
        for nxt in succ[place]:
            if nxt not in seen:
                seen.add(nxt)
                walk(nxt, seen, depth + 1)
                seen.discard(nxt)

    for start in graph.places:
        walk(start, {start}, 0)
    return best


def make_builder_plan(cert: PlaceCertificate) -> BuilderPlan:
    graph = cert.graph
    place_count = len(graph.places)
    layer_of = population_layers(graph)
    depth = max(layer_of.values(), default=0)
    layers = tuple(
        frozenset(p for p, s in layer_of.items() if s == j)
        for j in range(depth + 1)
    )
    k = _longest_otimes_path(graph)
    out_degree = max((len(t) for t in graph.targets.values()), default=0)
    if graph.targets:
        charge = max(place_count ** k, 2 * out_degree)
    else:
        charge = max(place_count, 1) ** k
    atoms_needed = len(graph.places - graph.otimes_places) * charge
    return BuilderPlan(
        layers=layers,
        k=k,
        place_count=place_count,
        atom_rank=min_atom_rank(max(atoms_needed, 1)),
        base_charge=charge,
        max_out_degree=max(out_degree, 1),
    )


class _Builder:
    """Runs the layered construction with its runtime contract checks:
    every populated layer is nonempty on schedule, each firing node offers
    enough fresh pairs, the blocks stay a partition, ranks stay under the
    per-stage bound, and the finished partition induces exactly the
    certificate graph."""

    def __init__(self, conj: NormConj, cert: PlaceCertificate, limits: SolverLimits):
        self.conj = conj
        self.cert = cert
        self.graph = cert.graph
        self.limits = limits
        self.plan = make_builder_plan(cert)
        self.places = sort_places(self.graph.places)
        self.blocks: dict = {p: set() for p in self.places}
        self.placed: set[HFSet] = set()
        self.stage = 0

    def _budget_check(self):
        total = len(self.placed)
        if total > self.limits.element_budget:
            raise SizeLimit(
                f"model construction exceeded {self.limits.element_budget} elements"
            )

    def _deal(self, elements: Sequence[HFSet], targets: list):
        bound = self.plan.atom_rank + self.stage
        for i, element in enumerate(elements):
            if element.rank > bound:
                raise ContractViolation(
                    f"rank bound: {element.rank} exceeds {bound} at stage {self.stage}"
                )
            place = targets[i % len(targets)]
            self.blocks[place].add(element)
            self.placed.add(element)
        self._budget_check()

    def charge_bases(self):
        bases = len(self.graph.places - self.graph.otimes_places)
        if bases * self.plan.base_charge > self.limits.element_budget:
            raise SizeLimit(
                f"base charge {self.plan.base_charge} x {bases} places "
                f"exceeds the element budget {self.limits.element_budget}"
            )
        index = 0
        height = self.plan.atom_rank
        for place in sort_places(self.graph.places - self.graph.otimes_places):
            for _ in range(self.plan.base_charge):
                atom = atom_of_rank(index, height)
                index += 1
                self.blocks[place].add(atom)
                self.placed.add(atom)
        self._budget_check()

    def run_waves(self):
        plan = self.plan
        layer_of = population_layers(self.graph)
        fired: set[Node] = set()
        while True:
            fireable = [
                node
                for node in _sorted_nodes(self.graph.targets)
                if node not in fired and all(self.blocks[m] for m in node)
            ]
            if not fireable:
                break
            self.stage += 1
            snapshot = {p: sorted(b) for p, b in self.blocks.items()}
            placed_before = frozenset(self.placed)
            for node in fireable:
                targets = sort_places(self.graph.targets[node])
                if _pair_space_size(snapshot, node) > self.limits.element_budget:
                    raise SizeLimit(
                        f"pair space of {format_node(node)} exceeds the "
                        f"element budget {self.limits.element_budget}"
                    )
                avail = [
                    e for e in _pairs_over(snapshot, node)
                    if e not in placed_before
                ]
                p, k, j = plan.place_count, plan.k, self.stage
                if j <= k and len(avail) < p ** (k - j):
                    raise ContractViolation(
                        f"fresh-pair supply: node {format_node(node)} at stage {j} "
                        f"offers {len(avail)}, needs {p ** (k - j)}"
                    )
                quota = max(
                    p ** (k - j - 1) if k - j - 1 >= 0 else 1,
                    2 * plan.max_out_degree,
                )
                need = quota * len(targets)
                if len(avail) < need:
                    raise ContractViolation(
                        f"distribution shortfall at {format_node(node)}: "
                        f"{len(avail)} fresh pairs for {need} slots"
                    )
                self._deal(avail[:need], targets)
                fired.add(node)
            self._check_population(layer_of)
            self._check_disjointness()

    def saturate(self):
        queue = deque(_sorted_nodes(self.graph.saturated))
        queued = set(queue)
        pops = 0
        while queue:
            node = queue.popleft()
            queued.discard(node)
            pops += 1
            if pops > self.limits.saturation_budget:
                raise BudgetExhausted(
                    f"saturation did not converge within "
                    f"{self.limits.saturation_budget} pops"
                )
            if _pair_space_size(self.blocks, node) > self.limits.element_budget:
                raise SizeLimit(
                    f"pair space of {format_node(node)} exceeds the "
                    f"element budget {self.limits.element_budget}"
                )
            fresh = [
                e for e in _pairs_over(self.blocks, node)
                if e not in self.placed
            ]
            if not fresh:
                continue
            targets = sort_places(self.graph.targets.get(node, frozenset()))
            if not targets:
                raise ContractViolation(
                    f"saturated node {format_node(node)} has content but no targets"
                )
            self.stage += 1
            self._deal(fresh, targets)
            grew = set(targets)
            for other in _sorted_nodes(self.graph.saturated):
                if other not in queued and other & grew:
                    queue.append(other)
                    queued.add(other)
        for node in self.graph.saturated:
            if any(
                e not in self.placed for e in _pairs_over(self.blocks, node)
            ):
                raise ContractViolation(
                    f"node {format_node(node)} still unsaturated after convergence"
                )

    def _check_population(self, layer_of: Mapping):
        for place, layer in layer_of.items():
            if layer <= self.stage and not self.blocks[place]:
                raise ContractViolation(
                    f"population: place {format_place(place)} of layer {layer} "
                    f"still empty at stage {self.stage}"
                )

    def _check_disjointness(self):
        total = sum(len(b) for b in self.blocks.values())
        if total != len(self.placed):
            raise ContractViolation("blocks are not pairwise disjoint")

    def _check_graph_match(self):
        block_sets = {p: HFSet(self.blocks[p]) for p in self.places}
        order = sorted(self.places, key=lambda p: block_sets[p])
        partition = Partition(tuple(block_sets[p] for p in order))
        induced = induce_from_partition(partition, place_ids=order)
        if induced.otimes_places != self.graph.otimes_places:
            raise ContractViolation("induced graph: product labels differ")
        if induced.edge_set() != self.graph.edge_set():
            raise ContractViolation("induced graph: edges differ from certificate")
        if len(self.places) <= self.limits.iso_cap:
            if weak_isomorphic(induced, self.graph, cap=self.limits.iso_cap) is None:
                raise ContractViolation("induced graph: no weak isomorphism with certificate")

    def build(self) -> SetAssignment:
        if not self.places:
            return {v: EMPTY for v in self.conj.vars}
        self.charge_bases()
        self._check_disjointness()
        self.run_waves()
        self.saturate()
        for place in self.places:
            if not self.blocks[place]:
                raise ContractViolation(
                    f"population: place {format_place(place)} never received content"
                )
        self._check_disjointness()
        self._check_graph_match()
        imap = self.cert.imap(self.conj.vars)
        model: SetAssignment = {}
        for v in sorted(self.conj.vars):
            elements: list[HFSet] = []
            for sig in imap[v]:
                elements.extend(self.blocks[sig])
            model[v] = HFSet(elements)
        for atom in self.conj.atoms:
            if not eval_literal(model, atom):
                raise ContractViolation(f"built model violates atom {atom}")
        bound = self.plan.atom_rank + self.stage
        if assignment_rank(model) > bound:
            raise ContractViolation(
                f"rank bound: model rank {assignment_rank(model)} exceeds {bound}"
            )
        return model


def build_model(
    conj: NormConj,
    cert: PlaceCertificate,
    limits: SolverLimits | None = None,
) -> SetAssignment:
    """Materialize a finite model from a verifying, saturation-acyclic
    certificate.  Raises ContractViolation when any internal check fails
    (always a bug, never a valid rejection of the input)."""
    limits = limits or SolverLimits()
    result = verify_certificate(conj, cert)
    if not result:
        raise ValueError(f"certificate does not verify: {result.reason}")
    if detect_saturation_cycle(cert.graph) is not None:
        raise ValueError("certificate has a saturation cycle; no finite model")
    return _Builder(conj, cert, limits).build()


def cart_saturate(
    state: Mapping, graph: TGraph, budget: int
) -> dict:
    """Distribute the full pair content of every saturated node among its
    targets until nothing is missing.  Deterministic (canonical element
    order, round-robin over sorted targets).

    ``budget`` meters distribution work (pops plus elements placed): on a
    cyclic graph the content grows without bound, so the budget trips while
    the state is still small instead of after memory is gone.  On an acyclic
    graph the queue empties after at most nodes * layers pops.
    """
    blocks: dict = {p: set(state.get(p, ())) for p in sort_places(graph.places)}
    placed = {e for b in blocks.values() for e in b}
    queue = deque(_sorted_nodes(graph.saturated))
    queued = set(queue)
    work = 0
    while queue:
        node = queue.popleft()
        queued.discard(node)
        work += 1
        if work > budget:
            raise BudgetExhausted(
                f"saturation work exceeded {budget} units (cycle?)"
            )
        fresh = _fresh_pairs_capped(blocks, placed, node, budget - work + 1)
        if not fresh:
            continue
        targets = sort_places(graph.targets.get(node, frozenset()))
        if not targets:
            raise ContractViolation(
                f"saturated node {format_node(node)} has content but no targets"
            )
        work += len(fresh)
        if work > budget:
            raise BudgetExhausted(
                f"saturation work exceeded {budget} units (cycle?)"
            )
        for i, element in enumerate(fresh):
            place = targets[i % len(targets)]
            blocks[place].add(element)
            placed.add(element)
        grew = set(targets)
        for other in _sorted_nodes(graph.saturated):
            if other not in queued and other & grew:
                queue.append(other)
                queued.add(other)
    return {p: frozenset(b) for p, b in blocks.items()}


def _fresh_pairs_capped(
    blocks: Mapping, placed: set, node: Node, cap: int
) -> list[HFSet]:
    """Unplaced pair content of ``node``, lazily enumerated and abandoned
    once more than ``cap`` fresh pairs exist, so cyclic growth cannot run
    away while the budget is being enforced.  When the cap is not hit the
    result is complete and canonically ordered."""
    members = sort_places(node)

    def candidates():
        if len(members) == 1:
            items = sorted(blocks[members[0]])
            for u in items:
                yield HFSet((u,))
            for i, u in enumerate(items):
                for v in items[i + 1:]:
                    yield HFSet((u, v))
        else:
            for u in sorted(blocks[members[0]]):
                for v in sorted(blocks[members[1]]):
                    yield HFSet((u, v))

    fresh: set[HFSet] = set()
    for element in candidates():
        if element not in placed and element not in fresh:
            fresh.add(element)
            if len(fresh) > cap:
                break
    return sorted(fresh)


# --- rank bound ---

def rank_bound(conj: NormConj) -> int:
    """A computable bound on the rank of the models the search returns:
    worst-case atom rank plus the maximum possible number of product
    layers."""
    sigs = allowed_signatures(conj)
    place_max = len(sigs)
    prod_lhs = {a.x for a in conj.atoms if isinstance(a, (ProdEq, ProdSub))}
    k_max = sum(1 for s in sigs if s & prod_lhs)
    if place_max == 0:
        return min_atom_rank(1)
    charge = max(place_max ** k_max, 2 * place_max)
    height = min_atom_rank(place_max * charge)
    return height + k_max


# --- extraction from concrete models ---

def certificate_from_assignment(
    assignment: Mapping[str, HFSet]
) -> PlaceCertificate:
    """Abstract a concrete assignment into the certificate its Venn
    partition induces."""
    partition, pa = venn_of(assignment)
    sigs = [pa.signature_of(i) for i in range(len(partition.blocks))]
    graph = induce_from_partition(partition, place_ids=sigs)
    return PlaceCertificate(tuple(sort_places(sigs)), graph)


# --- formula-level driver ---

def solve_formula(
    source: str | Formula, limits: SolverLimits | None = None
) -> Verdict:
    """Parse, normalize and decide a formula.  The model of a sat-finite
    verdict covers exactly the formula's variables (normalization-internal
    variables are projected away; unconstrained variables become empty)."""
    limits = limits or SolverLimits()
    formula = parse_formula(source) if isinstance(source, str) else source
    names = formula_vars(formula)
    first_cyclic: Verdict | None = None
    for conj in normalize_formula(formula, dnf_cap=limits.dnf_cap):
        verdict = search(conj, limits)
        if verdict.status == "sat-finite":
            model = {v: verdict.model.get(v, EMPTY) for v in names}
            return Verdict("sat-finite", model=model, certificate=verdict.certificate)
        if verdict.status == "sat-infinite-only" and first_cyclic is None:
            first_cyclic = verdict
    if first_cyclic is not None:
        return first_cyclic
    return Verdict("unsat")


# --- JSON ---

def certificate_to_json(cert: PlaceCertificate) -> dict:
    index = {sig: i for i, sig in enumerate(cert.places)}

    def node_ids(node: Node) -> list[int]:
        return sorted(index[p] for p in node)

    graph = cert.graph
    return {
        "places": [sorted(sig) for sig in cert.places],
        "otimes": sorted(index[p] for p in graph.otimes_places),
        "edges": [
            [node_ids(node), index[place]]
            for node in _sorted_nodes(graph.targets)
            for place in sort_places(graph.targets[node])
        ],
        "saturated": [node_ids(node) for node in _sorted_nodes(graph.saturated)],
    }


def verdict_to_json(verdict: Verdict) -> dict:
    out: dict = {"status": verdict.status}
    if verdict.model is not None:
        out["model"] = assignment_to_json(verdict.model)
    if verdict.certificate is not None:
        out["certificate"] = certificate_to_json(verdict.certificate)
    if verdict.cycle is not None:
        index = {sig: i for i, sig in enumerate(verdict.certificate.places)}
        encoded = []
        for vertex in verdict.cycle:
            if vertex in index:
                encoded.append(index[vertex])
            else:
                encoded.append(sorted(index[p] for p in vertex))
        out["cycle"] = encoded
    return out
