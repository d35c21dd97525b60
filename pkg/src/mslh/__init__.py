"""Decide satisfiability of monadic shallow linear Horn (MSLH) clause sets,
build finite models from their saturations, and move between model
representations via tree automata."""

from .kernel import (
    Atom,
    Clause,
    Fn,
    Literal,
    Order,
    Signature,
    Substitution,
    Var,
    apply,
    kbo_compare,
    match,
    shape_checks,
    unify,
)
from .modelbuild import (
    FiniteStructure,
    ProductionRule,
    build_finite_model,
    evaluate,
    ground_membership,
    herbrand_automaton,
    production_rules,
    verify_model,
)
from .pipeline import PipelineResult, run_pipeline
from .saturate import Limits, Refutation, ResourceOut, Saturated, ordered_factor, ordered_resolve, saturate, select
from .syntax import ParseError, parse, parse_atom, parse_clause, parse_clauses, parse_term, parse_text
from .transform import TransformLedger, approximate, back_translate_query, redundancy_cleanup, rrs, rrs_step
from .treeauto import (
    ADC,
    AMC,
    IG,
    TreeAutomaton,
    accepts,
    adc_to_ig,
    amc_to_ta,
    complement,
    from_linear_atom,
    ig_to_ta,
    intersect,
    is_empty,
    ta_to_mslh,
    union,
)

__version__ = "0.1.0"
