"""Acceptance suite: one test per criterion, each printing a PASS line with
its measurements.  Run with ``pytest tests/test_acceptance.py -v -s``."""

import functools
import itertools
import random
import time
import timeit

from setsat.errors import ContractViolation
from setsat.formulas import (
    DiffA, NonEmpty, NormConj, ProdEq, ProdSub, UnionA, normalize_formula,
    parse_formula,
)
from setsat.hfset import otimes, pow_star_le2
from setsat.oracle import OracleConfig, oracle_search
from setsat.semantics import (
    Partition, PartitionAssignment, assignment_from_json, assignment_rank,
    assignment_to_json, check_boolean_on_signatures, eval_formula,
    eval_literal,
)
from setsat.solver import (
    build_model, canonical_certificate, certificate_from_assignment,
    rank_bound, search, solve_formula, verify_certificate,
)
from setsat.tgraph import detect_saturation_cycle

from conftest import random_hfset, random_partition_blocks

PHI_INF = "x != 0 && z = x*x && z <= x"
PHI_RELAXED = "x != 0 && z <= x*x && z <= x"

CORPUS_VARS = ("a", "b")


def _corpus_atoms():
    atoms = []
    for kind in (UnionA, DiffA, ProdEq, ProdSub):
        for x in CORPUS_VARS:
            for y in CORPUS_VARS:
                for z in CORPUS_VARS:
                    atoms.append(kind(x, y, z))
    atoms.extend(NonEmpty(v) for v in CORPUS_VARS)
    return atoms


def _swap(atom):
    table = {"a": "b", "b": "a"}
    if isinstance(atom, NonEmpty):
        return NonEmpty(table[atom.x])
    return type(atom)(table[atom.x], table[atom.y], table[atom.z])


def _mentions_both(atoms) -> bool:
    seen = set()
    for atom in atoms:
        seen.add(atom.x)
        if not isinstance(atom, NonEmpty):
            seen.update((atom.y, atom.z))
    return seen == set(CORPUS_VARS)


@functools.lru_cache(maxsize=1)
def corpus() -> tuple[NormConj, ...]:
    """Every conjunction over exactly two variables with at most three
    atoms, deduplicated up to swapping the variables."""
    out = []
    seen = set()
    atoms = _corpus_atoms()
    for size in (1, 2, 3):
        for combo in itertools.combinations(atoms, size):
            if not _mentions_both(combo):
                continue
            key = min(
                tuple(sorted(map(repr, combo))),
                tuple(sorted(repr(_swap(a)) for a in combo)),
            )
            if key in seen:
                continue
            seen.add(key)
            out.append(
                NormConj(
                    atoms=tuple(combo),
                    original_vars=frozenset(CORPUS_VARS),
                    fresh_vars=frozenset(),
                )
            )
    return tuple(out)


@functools.lru_cache(maxsize=1)
def corpus_results():
    cfg = OracleConfig()
    results = []
    for conj in corpus():
        verdict = search(conj)
        model = oracle_search(conj, cfg)
        results.append((conj, verdict, model))
    return results


def test_criterion_1_phi_infinity_classification():
    start = time.perf_counter()
    verdict = solve_formula(PHI_INF)
    assert verdict.status == "sat-infinite-only"

    conj = normalize_formula(PHI_INF)[0]
    bounded = oracle_search(conj, OracleConfig(max_rank=4, universe_cap=10))
    assert bounded is None

    cycle = detect_saturation_cycle(verdict.certificate.graph)
    assert cycle is not None and len(cycle) >= 3
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    print(
        f"\nCRITERION 1: PASS - infinite-only classification, no bounded "
        f"model, cycle of length {len(cycle)} ({elapsed:.2f}s)"
    )


def test_criterion_2_relaxed_fragment_finiteness():
    start = time.perf_counter()
    verdict = solve_formula(PHI_RELAXED)
    assert verdict.status == "sat-finite"

    # the printed model must pass the checker verbatim
    restored = assignment_from_json(assignment_to_json(verdict.model))
    assert eval_formula(restored, parse_formula(PHI_RELAXED))

    conj = normalize_formula(PHI_RELAXED)[0]
    bound = rank_bound(conj)
    rank = assignment_rank(verdict.model)
    assert rank <= bound
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0
    print(
        f"\nCRITERION 2: PASS - finite model, check ok, rank {rank} <= "
        f"bound {bound} ({elapsed:.2f}s)"
    )


def test_criterion_3_oracle_equivalence_corpus():
    start = time.perf_counter()
    results = corpus_results()
    failures = []
    stats = {"unsat": 0, "sat-finite": 0, "sat-infinite-only": 0}
    for conj, verdict, model in results:
        stats[verdict.status] += 1
        if model is not None and verdict.status == "unsat":
            failures.append(("oracle model but unsat", conj.atoms))
        if verdict.status == "sat-finite":
            if not all(eval_literal(verdict.model, a) for a in conj.atoms):
                failures.append(("invalid model", conj.atoms))
        if verdict.status == "unsat" and model is not None:
            failures.append(("unsat but oracle model", conj.atoms))
    elapsed = time.perf_counter() - start
    assert not failures, failures[:5]
    assert elapsed < 600.0
    print(
        f"\nCRITERION 3: PASS - {len(results)} conjunctions, {stats}, "
        f"zero disagreements ({elapsed:.1f}s)"
    )


def test_corpus_never_calls_a_witnessed_formula_infinite_only():
    """Stronger than criterion 3 demands: a bounded-universe witness is a
    finite model, so the infinite-only classification must never fire for
    a conjunction the oracle solves."""
    offenders = [
        (conj.atoms, verdict.status)
        for conj, verdict, model in corpus_results()
        if model is not None and verdict.status == "sat-infinite-only"
    ]
    assert not offenders, offenders[:5]


def test_criterion_4_lemma_suites():
    rng = random.Random(2024)
    start = time.perf_counter()

    for _ in range(1000):
        s = random_hfset(rng, 4, 4)
        t = random_hfset(rng, 4, 4)
        assert pow_star_le2([s, t]) == frozenset(otimes(s, t))

    overlaps = 0
    for _ in range(1000):
        s1, s2 = (random_hfset(rng, 2, 2) for _ in range(2))
        # reuse or perturb the first factors half the time so the two
        # products actually intersect often
        t1, t2 = (
            rng.choice((s1, s2, random_hfset(rng, 2, 2), s1.union(s2)))
            for _ in range(2)
        )
        if otimes(s1, s2).inter(otimes(t1, t2)).is_empty():
            continue
        overlaps += 1
        assert (
            not t1.inter(s1).is_empty() and not t2.inter(s2).is_empty()
        ) or (
            not t1.inter(s2).is_empty() and not t2.inter(s1).is_empty()
        )

    names = ("x", "y", "z")
    boolean_atoms = [NonEmpty(v) for v in names]
    for kind in (UnionA, DiffA):
        boolean_atoms.extend(
            kind(x, y, z) for x in names for y in names for z in names
        )
    for _ in range(1000):
        blocks = random_partition_blocks(rng, max_rank=4)
        partition = Partition(tuple(blocks))
        count = len(partition.blocks)
        imap = {
            v: frozenset(i for i in range(count) if rng.random() < 0.5)
            for v in names
        }
        pa = PartitionAssignment(partition, frozenset(names), imap)
        induced = pa.induced_assignment()
        for atom in boolean_atoms:
            assert eval_literal(induced, atom) == check_boolean_on_signatures(
                imap, atom
            )
    elapsed = time.perf_counter() - start
    print(
        f"\nCRITERION 4: PASS - 1000 product/power-set cases, 1000 overlap "
        f"cases ({overlaps} nontrivial), 1000 signature cases ({elapsed:.1f}s)"
    )


def test_criterion_5_builder_contract_on_corpus():
    start = time.perf_counter()
    violations = []
    built = 0
    for conj, verdict, _ in corpus_results():
        if verdict.status != "sat-finite":
            continue
        try:
            model = build_model(conj, verdict.certificate)
        except ContractViolation as err:
            violations.append((conj.atoms, str(err)))
            continue
        built += 1
        assert all(eval_literal(model, a) for a in conj.atoms)
    elapsed = time.perf_counter() - start
    assert not violations, violations[:5]
    print(
        f"\nCRITERION 5: PASS - builder checks held on {built} finite "
        f"instances ({elapsed:.1f}s)"
    )


def test_criterion_6_model_to_certificate_loop():
    rng = random.Random(777)
    cfg = OracleConfig()
    pool = [
        (UnionA, 3), (DiffA, 3), (ProdEq, 3), (ProdSub, 3), (NonEmpty, 1),
    ]
    names = ("a", "b", "c")
    start = time.perf_counter()
    accepted = 0
    rejected = []
    attempts = 0
    while accepted < 200:
        attempts += 1
        assert attempts < 5000, "generator failed to reach 200 models"
        atoms = []
        for _ in range(rng.randint(1, 3)):
            kind, arity = pool[rng.randrange(len(pool))]
            atoms.append(kind(*(rng.choice(names[:2]) for _ in range(arity))))
        conj = NormConj(
            atoms=tuple(atoms),
            original_vars=frozenset(names[:2]),
            fresh_vars=frozenset(),
        )
        model = oracle_search(conj, cfg)
        if model is None:
            continue
        cert = certificate_from_assignment(model)
        result = verify_certificate(conj, cert)
        if result.ok:
            accepted += 1
        else:
            rejected.append((atoms, result.reason))
    elapsed = time.perf_counter() - start
    assert not rejected, rejected[:5]
    print(
        f"\nCRITERION 6: PASS - 200 oracle models abstracted and verified "
        f"({elapsed:.1f}s)"
    )


def _scaling_certificate(place_count: int):
    pads = ["p1", "p2", "p3", "p4", "p5"]
    conj = NormConj(
        atoms=(ProdEq("x", "y", "y"), NonEmpty("y")),
        original_vars=frozenset(["x", "y", *pads]),
        fresh_vars=frozenset(),
    )
    half = place_count // 2
    pad_subsets = []
    for size in range(len(pads) + 1):
        pad_subsets.extend(itertools.combinations(pads, size))
    sigs = [frozenset(("y", *combo)) for combo in pad_subsets[:half]]
    sigs += [frozenset(("x", *combo)) for combo in pad_subsets[:half]]
    cert = canonical_certificate(conj, sigs)
    result = verify_certificate(conj, cert)
    assert result.ok, result.reason
    return conj, cert


def test_criterion_7_verifier_scaling():
    timings = {}
    for places in (8, 16, 32):
        conj, cert = _scaling_certificate(places)
        runner = timeit.Timer(lambda: verify_certificate(conj, cert))
        number = max(3, int(0.05 / max(min(runner.repeat(1, 1)), 1e-6)))
        timings[places] = min(runner.repeat(5, number)) / number
    ratio_16 = timings[16] / timings[8]
    ratio_32 = timings[32] / timings[16]
    # cubic doubling means a factor of 8; allow headroom for constant terms
    # and timer noise while still rejecting anything quartic or worse
    assert ratio_16 <= 14.4, timings
    assert ratio_32 <= 14.4, timings
    print(
        f"\nCRITERION 7: PASS - verify times "
        f"{', '.join(f'{p}: {timings[p]*1e3:.2f}ms' for p in timings)}; "
        f"ratios {ratio_16:.1f}x, {ratio_32:.1f}x (cubic doubling = 8x)"
    )
