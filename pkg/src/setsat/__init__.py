"""setsat: a decision procedure for quantifier-free set formulas with
union, intersection, difference, inclusion and the unordered Cartesian
product, over hereditarily finite (and, symbolically, infinite) models."""

from .errors import (
    BadRank, BudgetExhausted, ContractViolation, ParseError, SetSatError,
    SizeLimit, UnboundVariable,
)
from .formulas import (
    Atom, DiffA, Empty, Eq, Expr, Formula, Neq, NonEmpty, NormAtom, NormConj,
    NotSub, Prod, ProdEq, ProdSub, Sub, UnionA, Var, format_formula,
    normalize_branch, normalize_formula, parse_formula, to_dnf,
)
from .hfset import (
    EMPTY, HFFamily, HFSet, ack, atom_of_rank, hf, min_atom_rank, otimes,
    pow_star, pow_star_gt2, pow_star_le2, von_neumann,
)
from .oracle import OracleConfig, build_universe, oracle_search
from .semantics import (
    Partition, PartitionAssignment, SetAssignment, assignment_from_json,
    assignment_rank, assignment_to_json, check_boolean_on_signatures,
    eval_formula, eval_literal, partition_to_json, venn_of,
)
from .solver import (
    BuilderPlan, PlaceCertificate, SolverLimits, Verdict, allowed_signatures,
    build_model, canonical_certificate, cart_saturate,
    certificate_from_assignment, rank_bound, search, solve_formula,
    verdict_to_json, verify_certificate,
)
from .tgraph import (
    TGraph, detect_saturation_cycle, induce_from_partition, node_of,
    population_closure, to_dot, weak_isomorphic,
)

__version__ = "0.1.0"
