"""Hypothesis-driven properties for the syntax layer and the set kernel."""

from hypothesis import given, settings
from hypothesis import strategies as st

from setsat.formulas import (
    And, AtomF, Diff, Empty, Eq, Implies, Inter, Neq, Not, Or, Prod, Sub,
    Union, Var, format_formula, negate_atom, parse_formula, to_dnf,
)
from setsat.hfset import EMPTY, HFSet, otimes, pow_star_le2

idents = st.sampled_from(["x", "y", "z", "w", "a1", "B_2"])

exprs = st.recursive(
    st.one_of(idents.map(Var), st.just(Empty())),
    lambda child: st.one_of(
        st.builds(Union, child, child),
        st.builds(Inter, child, child),
        st.builds(Diff, child, child),
        st.builds(Prod, child, child),
    ),
    max_leaves=8,
)

# NotSub has no surface operator (it prints as a negation), so the
# structural round trip quantifies over the three printable atom forms
atoms = st.one_of(
    st.builds(Eq, exprs, exprs),
    st.builds(Neq, exprs, exprs),
    st.builds(Sub, exprs, exprs),
)

formulas = st.recursive(
    atoms.map(AtomF),
    lambda child: st.one_of(
        st.builds(Not, child),
        st.builds(And, child, child),
        st.builds(Or, child, child),
        st.builds(Implies, child, child),
    ),
    max_leaves=12,
)

hfsets = st.recursive(
    st.just(EMPTY),
    lambda child: st.lists(child, max_size=3).map(HFSet),
    max_leaves=12,
)


@given(formulas)
def test_parse_inverts_format(f):
    assert parse_formula(format_formula(f)) == f


@given(formulas)
@settings(max_examples=60)
def test_dnf_branches_are_clean(f):
    for branch in to_dnf(f, cap=2048):
        seen = set(branch)
        assert len(seen) == len(branch)
        assert not any(negate_atom(a) in seen for a in seen)


@given(hfsets)
def test_reconstruction_is_identity(s):
    assert HFSet(s.elements) is s
    assert HFSet.from_lists(s.to_lists()) is s


@given(hfsets, hfsets)
def test_order_is_total(a, b):
    assert (a < b) + (b < a) + (a == b) == 1


@given(hfsets, hfsets, hfsets)
@settings(max_examples=60)
def test_order_is_transitive(a, b, c):
    x, y, z = sorted([a, b, c])
    assert x <= y <= z and x <= z


@given(hfsets, hfsets)
@settings(max_examples=150)
def test_pairwise_power_set_is_the_product(s, t):
    assert pow_star_le2([s, t]) == frozenset(otimes(s, t))


@given(hfsets, hfsets)
def test_product_commutes(s, t):
    assert otimes(s, t) == otimes(t, s)
