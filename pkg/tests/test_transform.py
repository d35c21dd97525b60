import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mslh.kernel import Atom, Clause, Fn, Var, equal_modulo_renaming, equal_modulo_symbols, is_mslh
from mslh.modelbuild import MembershipOracle
from mslh.saturate import Saturated, saturate
from mslh.syntax import parse_atom, parse_clauses
from mslh.transform import (
    TransformError,
    TransformLedger,
    approximate,
    back_translate_query,
    detect_reflexive,
    redundancy_cleanup,
    rrs,
    rrs_step,
    rrs_step_bound,
    translate_query,
)

from rrsgen import random_split_set
from soundness import check_clause, random_horn_clause

EQUIVALENCE = parse_clauses("r(X,X). r(Y,X) | ~r(X,Y). r(X,Z) | ~r(X,Y) | ~r(Y,Z).")
EQUIVALENCE_RRS = parse_clauses(
    """
    r_rfl(X,X).
    r_irr(Y,X) | ~r_irr(X,Y).
    r_rfl(X,X) | ~r_rfl(X,X).
    r_irr(X,Z) | ~r_irr(X,Y) | ~r_irr(Y,Z).
    r_rfl(X,X) | ~r_irr(X,Y) | ~r_irr(Y,X).
    r_irr(X,Y) | ~r_irr(X,Y) | ~r_rfl(Y,Y).
    r_irr(X,Z) | ~r_rfl(X,X) | ~r_irr(X,Z).
    r_rfl(X,X) | ~r_rfl(X,X) | ~r_rfl(X,X).
    """
)
EQUIVALENCE_CLEAN = parse_clauses("r_rfl(X,X). r_irr(Y,X) | ~r_irr(X,Y). r_irr(X,Z) | ~r_irr(X,Y) | ~r_irr(Y,Z).")
INTRO = parse_clauses("r(X,X). r(X,Y) | ~r(g(X),g(Y)). ~r(g(X),c).")
SPLIT_INTRO = parse_clauses("t(f_rfl(X,Y)). t(f_irr(X,Y)) | ~t(f_irr(g(X),g(Y))). ~t(f_irr(g(X),c)).")


# -- splitting -----------------------------------------------------------


def test_rrs_step_reflexive_then_delete():
    step = rrs_step(parse_clauses("r(X,X)."), "r")
    assert step == parse_clauses("r_irr(X,X). r_rfl(X,X).")
    # later steps run on a set that already mentions the split names
    assert rrs_step(step, "r", check=False) == parse_clauses("r_rfl(X,X).")


def test_rrs_step_irreflexive_by_occurs_check():
    assert rrs_step(parse_clauses("~r(Y,g(Y))."), "r") == parse_clauses("~r_irr(Y,g(Y)).")


def test_rrs_step_delete_has_priority():
    cs = parse_clauses("p(X) | ~r_irr(X,X). r(a,b).")
    assert rrs_step(cs, "r", check=False) == parse_clauses("r(a,b).")


def test_rrs_step_normal_form_and_misuse():
    assert rrs_step(parse_clauses("p(a)."), "r") is None
    with pytest.raises(TransformError):
        rrs_step(parse_clauses("r(a,b). r_rfl(a,a)."), "r")
    with pytest.raises(TransformError):
        rrs(parse_clauses("r(a)."), ["r"])


def test_rrs_small_example():
    out, ledger, _ = rrs(parse_clauses("r(X,X). ~r(Y,g(Y))."), ["r"])
    assert out == parse_clauses("r_rfl(X,X). ~r_irr(Y,g(Y)).")
    assert ledger.split_map == {"r": ("r_rfl", "r_irr")}


def test_rrs_equivalence_relation():
    out, _, stats = rrs(EQUIVALENCE, ["r"])
    assert equal_modulo_renaming(out, EQUIVALENCE_RRS)
    assert len(out) == 8
    assert stats.steps <= stats.bound
    assert equal_modulo_renaming(redundancy_cleanup(out), EQUIVALENCE_CLEAN)


def test_rrs_without_occurrence_is_identity():
    cs = parse_clauses("p(a). q(X) | ~p(X).")
    assert rrs(cs, ["r"])[0] == cs


def test_redundancy_cleanup_examples():
    assert redundancy_cleanup(parse_clauses("p(X) | ~p(X).")) == []
    assert redundancy_cleanup(parse_clauses("p(a). p(X).")) == parse_clauses("p(X).")
    assert redundancy_cleanup(parse_clauses("p(X) | ~q(X) | ~q(X).")) == parse_clauses("p(X) | ~q(X).")


def test_detect_reflexive():
    assert detect_reflexive(INTRO) == ["r"]
    assert detect_reflexive(parse_clauses("r(X,Y).")) == []


@pytest.mark.parametrize("seed", range(10))
def test_rrs_confluence_and_shape(seed):
    rng = random.Random(seed)
    cs = random_split_set(rng)
    reference, _, stats = rrs(cs, ["r"])
    assert stats.steps <= rrs_step_bound(cs, ["r"])
    for c in reference:
        for a in c.atoms():
            assert a.pred != "r"
            assert not (a.pred == "r_irr" and a.args[0] == a.args[1])
    for k in range(3):
        other, _, _ = rrs(cs, ["r"], rng=random.Random(seed * 100 + k))
        assert equal_modulo_renaming(reference, other)


# -- approximation -------------------------------------------------------


def test_approximation_of_the_split_intro_set():
    split, ledger, _ = rrs(INTRO, ["r"])
    out, ledger = approximate(redundancy_cleanup(split), ledger=ledger)
    assert equal_modulo_symbols(out, SPLIT_INTRO, fixed=("g", "c"))
    assert ledger.monadic_map == {"r_rfl": "f_r_rfl", "r_irr": "f_r_irr"}


def test_approximation_of_the_unsplit_intro_set():
    out, ledger = approximate(INTRO)
    expected = parse_clauses("t(f_r(X,Y)). t(f_r(X,Y)) | ~t(f_r(g(X),g(Y))). ~t(f_r(g(X),c)).")
    assert equal_modulo_renaming(out, expected)
    assert ledger.lossy


def test_approximation_of_the_small_split_example():
    split, ledger, _ = rrs(parse_clauses("r(X,X). ~r(Y,g(Y))."), ["r"])
    out, ledger = approximate(split, ledger=ledger)
    expected = parse_clauses("t(f_rfl(X,Y)). s(g(Y)). ~s(Z) | ~t(f_irr(Y,Z)).")
    assert equal_modulo_symbols(out, expected, fixed=("g",))
    assert list(ledger.guard_map) == ["q1"]


def test_approximation_keeps_mslh_input():
    cs = parse_clauses("p(a). q(f(X,Y)) | ~p(X). ~q(X) | ~p(X).")
    out, ledger = approximate(cs)
    assert out == cs
    assert not ledger.lossy and not ledger.introduced()


def test_approximation_rejects_non_horn():
    with pytest.raises(TransformError):
        approximate([Clause((), (parse_atom("p(a)"), parse_atom("q(a)")))])


def test_fresh_symbols_avoid_the_input_signature():
    out, ledger = approximate(parse_clauses("t(a). f_r(b). r(X,g(X))."))
    assert ledger.monadic_predicate not in ("t",)
    assert ledger.monadic_map["r"] != "f_r"
    assert len(set(ledger.introduced())) == len(ledger.introduced())


@given(st.integers(0, 10_000))
def test_approximation_output_is_mslh(seed):
    rng = random.Random(seed)
    cs = [random_horn_clause(rng) for _ in range(3)]
    out, _ = approximate(cs)
    assert all(is_mslh(c) for c in out)


@pytest.mark.parametrize("seed", range(4))
def test_approximation_soundness_small_domains(seed):
    rng = random.Random(1000 + seed)
    c = random_horn_clause(rng)
    ok, info = check_clause(c, max_domain=2)
    assert ok, (c, info)


def test_soundness_oracle_detects_an_unsound_approximation():
    def drop_everything(cs):
        return [], TransformLedger()

    ok, _ = check_clause(parse_clauses("r(X,g(X)).")[0], max_domain=2, approx=drop_everything)
    assert not ok


# -- back-translation ----------------------------------------------------


def _intro_oracle():
    split, ledger, _ = rrs(INTRO, ["r"])
    out, ledger = approximate(redundancy_cleanup(split), ledger=ledger)
    result = saturate(out)
    assert isinstance(result, Saturated)
    return ledger, MembershipOracle(result.clauses)


def test_back_translation_on_the_intro_model():
    ledger, oracle = _intro_oracle()
    assert back_translate_query(ledger, parse_atom("r(g(g(c)),g(g(c)))"), oracle)
    assert not back_translate_query(ledger, parse_atom("r(g(c),c)"), oracle)


def test_translate_query_shapes():
    ledger, _ = _intro_oracle()
    assert translate_query(ledger, parse_atom("r(c,c)")) == parse_atom("t(f_r_rfl(c,c))")
    assert translate_query(ledger, parse_atom("r(c,g(c))")) == parse_atom("t(f_r_irr(c,g(c)))")
    assert translate_query(ledger, parse_atom("p(c)")) == parse_atom("p(c)")
    with pytest.raises(TransformError):
        translate_query(ledger, parse_atom("r(X,c)"))


def test_monadic_query_passes_through():
    ledger = TransformLedger()
    assert back_translate_query(ledger, parse_atom("p(a)"), lambda a: a == parse_atom("p(a)"))
