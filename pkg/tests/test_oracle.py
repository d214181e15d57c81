import pytest

from setsat.errors import SizeLimit
from setsat.formulas import (
    DiffA, NonEmpty, NormConj, ProdEq, ProdSub, UnionA, normalize_formula,
)
from setsat.hfset import EMPTY, HFSet, hf
from setsat.oracle import (
    OracleConfig, build_universe, first_sets_upto_rank, oracle_search,
    sets_of_rank_upto,
)
from setsat.semantics import eval_literal


def conj_of(*atoms, variables) -> NormConj:
    return NormConj(
        atoms=tuple(atoms),
        original_vars=frozenset(variables),
        fresh_vars=frozenset(),
    )


def test_sets_of_rank_upto():
    assert sets_of_rank_upto(0) == [EMPTY]
    assert len(sets_of_rank_upto(1)) == 2
    assert len(sets_of_rank_upto(2)) == 4
    assert len(sets_of_rank_upto(3)) == 16
    assert all(s.rank <= 2 for s in sets_of_rank_upto(2))


def test_first_sets_prefix_of_full_enumeration():
    full = sorted(sets_of_rank_upto(3))
    assert first_sets_upto_rank(3, 7) == full[:7]


def test_universe_is_deterministic_and_capped():
    cfg = OracleConfig()
    u1 = build_universe(cfg)
    u2 = build_universe(cfg)
    assert u1 == u2
    assert len(u1) == cfg.universe_cap
    assert u1[0] == EMPTY


def test_universe_contains_pair_witnesses():
    universe = build_universe(OracleConfig())
    assert hf(EMPTY) in universe          # pair of 0 with itself
    assert hf(hf(EMPTY)) in universe      # pair of {0} with itself


def test_empty_variable_model():
    conj = normalize_formula("x = x - x")[0]
    model = oracle_search(conj)
    assert model == {"x": EMPTY}


def test_phi_infinity_has_no_bounded_model():
    conj = normalize_formula("x != 0 && z = x*x && z <= x")[0]
    assert oracle_search(conj, OracleConfig(max_rank=4, universe_cap=10)) is None


def test_relaxed_phi_has_model():
    conj = normalize_formula("x != 0 && z <= x*x && z <= x")[0]
    model = oracle_search(conj)
    assert model is not None
    assert all(eval_literal(model, a) for a in conj.atoms)
    # deterministic first witness: smallest nonempty x, empty z
    assert model["x"] == hf(EMPTY)
    assert model["z"] == EMPTY


def test_returned_models_are_checker_valid(rng):
    pool = [
        (UnionA, 3), (DiffA, 3), (ProdEq, 3), (ProdSub, 3), (NonEmpty, 1),
    ]
    names = ("a", "b")
    found = 0
    for _ in range(200):
        atoms = []
        for _ in range(rng.randint(1, 3)):
            kind, arity = pool[rng.randrange(len(pool))]
            atoms.append(kind(*(rng.choice(names) for _ in range(arity))))
        conj = conj_of(*atoms, variables=names)
        model = oracle_search(conj)
        if model is None:
            continue
        found += 1
        assert all(eval_literal(model, a) for a in conj.atoms)
    assert found >= 80


def test_monotone_in_universe_cap(rng):
    """Growing the caps never loses a found model."""
    pool = [
        (UnionA, 3), (DiffA, 3), (ProdEq, 3), (ProdSub, 3), (NonEmpty, 1),
    ]
    names = ("a", "b")
    flips = []
    found = 0
    for _ in range(120):
        atoms = []
        for _ in range(rng.randint(1, 2)):
            kind, arity = pool[rng.randrange(len(pool))]
            atoms.append(kind(*(rng.choice(names) for _ in range(arity))))
        conj = conj_of(*atoms, variables=names)
        results = [
            oracle_search(conj, OracleConfig(universe_cap=cap)) is not None
            for cap in (4, 6, 8)
        ]
        found += results[0]
        for small, big in zip(results, results[1:]):
            if small and not big:
                flips.append(atoms)
    assert not flips
    assert found >= 30


def test_var_cap():
    conj = conj_of(
        NonEmpty("a"), NonEmpty("b"), NonEmpty("c"), NonEmpty("d"),
        variables=("a", "b", "c", "d"),
    )
    with pytest.raises(SizeLimit):
        oracle_search(conj)
    assert oracle_search(conj, OracleConfig(var_cap=4)) is not None


def test_product_equation_definitional_propagation():
    # z is forced to equal y * y; enumeration only runs over y
    conj = conj_of(ProdEq("z", "y", "y"), NonEmpty("z"), variables=("y", "z"))
    model = oracle_search(conj)
    assert model is not None
    assert model["z"] == HFSet([hf(hf(EMPTY))]) or not model["z"].is_empty()
    assert all(eval_literal(model, a) for a in conj.atoms)


def test_bad_config():
    with pytest.raises(ValueError):
        OracleConfig(max_rank=0)
