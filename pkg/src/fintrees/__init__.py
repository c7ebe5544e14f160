"""Decision and simplification procedure for the extended theory of finite and
infinite trees, with frontends for algebraic datatypes and codatatypes."""

from __future__ import annotations

from .basic import Contradiction, is_properly_reachable, is_solved_basic, reachable_set, solve_basic
from .datatypes import (
    Constructor,
    DatatypeDecl,
    check_declarations,
    default_value_for,
    eliminate_selectors_default,
    eliminate_selectors_standard,
    embed_in_trees,
)
from .errors import *  # noqa: F401,F403
from .formula import (
    FALSE,
    TRUE,
    And,
    BasicFormula,
    Bottom,
    Eq,
    EqAtom,
    Exists,
    Fin,
    Forall,
    Formula,
    Iff,
    Implies,
    NormalFormula,
    Not,
    Or,
    Top,
    formula_depth,
    free_variables,
)
from .instantiation import Instantiation, apply_instantiation, find_instantiation, strip_common_conjuncts
from .normalize import canonicalize, flatten_to_basic, normalize
from .oracle import eval_closed_finite, extract_model, random_formula
from .signature import (
    Generator,
    Signature,
    SortAnalysis,
    analyze,
    compute_finite_sets,
    compute_zero_sets,
    enumerate_domain,
    make_signature,
    validate_signature,
)
from .solver import SolveOutcome, is_fully_simplified, remove_unreachable_parts, solve, solve_final, solve_nested
from .terms import App, Sel, Var
from .trees import RationalTree, is_finite_tree, rational_tree_equal

__version__ = "0.1.0"
