import pytest
from hypothesis import given, settings, strategies as st

from clgames import formula as fm
from clgames.formula import (Atom, Bang, Bot, ChoiceAll, ChoiceConj,
                             ChoiceDisj, ChoiceExists, Dollar, Elem,
                             Implies, Neg, ParConj, ParDisj, Sequent, Top,
                             Var, int_impl)


def P(*args):
    return Atom("P", tuple(fm.term(a) for a in args))


def Q(*args):
    return Atom("Q", tuple(fm.term(a) for a in args))


class TestParsing:
    def test_choice_conjunction(self):
        assert fm.parse_formula("P & Q") == ChoiceConj((P(), Q()))

    def test_resource_implication(self):
        assert fm.parse_formula("!P -> P") == Implies(Bang(P()), P())

    def test_quantified_choice_disjunction(self):
        got = fm.parse_formula("@x.(P(x) + ~P(x))")
        assert got == ChoiceAll("x", ChoiceDisj((P("x"), Neg(P("x")))))

    def test_constants_and_dollar(self):
        assert fm.parse_formula("top") == Top()
        assert fm.parse_formula("bot") == Bot()
        assert fm.parse_formula("$") == Dollar()

    def test_variadic_collects_but_does_not_flatten(self):
        flat = fm.parse_formula("P /\\ Q /\\ P")
        assert isinstance(flat, ParConj) and len(flat.parts) == 3
        nested = fm.parse_formula("(P /\\ Q) /\\ P")
        assert isinstance(nested, ParConj) and len(nested.parts) == 2
        assert isinstance(nested.parts[0], ParConj)

    def test_implication_is_right_associative(self):
        f = fm.parse_formula("P -> Q -> P")
        assert f == Implies(P(), Implies(Q(), P()))

    def test_precedence(self):
        f = fm.parse_formula("P & Q -> P \\/ Q")
        assert isinstance(f, Implies)
        assert isinstance(f.left, ChoiceConj)
        assert isinstance(f.right, ParDisj)

    def test_mixed_same_level_needs_parens(self):
        with pytest.raises(fm.ParseError):
            fm.parse_formula("P /\\ Q & P")

    def test_arity_mismatch_rejected(self):
        with pytest.raises(fm.ParseError):
            fm.parse_formula("P(1) /\\ P(1,2)")

    def test_syntax_error_carries_position(self):
        with pytest.raises(fm.ParseError) as e:
            fm.parse_formula("P -> ")
        assert "position" in str(e.value)

    def test_lowercase_identifier_is_elementary(self):
        assert fm.parse_formula("p -> P") == Implies(Elem("p"), P())


class TestFreeVars:
    def test_bound_occurrence(self):
        assert fm.free_vars(fm.parse_formula("@x.P(x)")) == frozenset()

    def test_free_occurrences(self):
        assert fm.free_vars(fm.parse_formula("P(x,y)")) == {"x", "y"}

    def test_mixed_occurrences(self):
        f = fm.parse_formula("!P(x) -> ?x.Q(x)")
        assert fm.free_vars(f) == {"x"}


class TestSubstitute:
    def test_basic(self):
        assert fm.substitute(P("x"), [("x", 5)]) == P(5)

    def test_bound_untouched(self):
        f = fm.parse_formula("@x.P(x)")
        assert fm.substitute(f, [("x", 5)]) == f

    def test_simultaneous(self):
        f = fm.parse_formula("P(x,y)")
        assert fm.substitute(f, [("x", "y"), ("y", "x")]) == P("y", "x")

    def test_duplicate_variable_rejected(self):
        with pytest.raises(ValueError):
            fm.substitute(P("x"), [("x", 1), ("x", 2)])

    def test_constant_substitution_removes_free_occurrence(self):
        f = fm.parse_formula("P(x) /\\ ?x.Q(x)")
        assert "x" not in fm.free_vars(fm.substitute(f, [("x", 3)]))


class TestFreeFor:
    def test_constants_always_free_for(self):
        assert fm.is_free_for(3, "x", P("x"))

    def test_capture_detected(self):
        f = ChoiceAll("y", P("x", "y"))
        assert not fm.is_free_for("y", "x", f)

    def test_different_binder_is_fine(self):
        f = ChoiceAll("z", P("x", "z"))
        assert fm.is_free_for("y", "x", f)

    def test_no_free_occurrence_is_fine(self):
        f = ChoiceAll("y", ChoiceAll("x", P("x", "y")))
        assert fm.is_free_for("y", "x", f)


class TestSequents:
    def test_empty_context(self):
        s = fm.parse_sequent("=> P")
        assert fm.sequent_to_formula(s) == P()

    def test_single_context(self):
        s = fm.parse_sequent("Q => P")
        assert fm.sequent_to_formula(s) == Implies(Bang(Q()), P())

    def test_two_member_context(self):
        s = fm.parse_sequent("P, Q => P")
        got = fm.sequent_to_formula(s)
        assert got == Implies(ParConj((Bang(P()), Bang(Q()))), P())

    def test_sublanguage_enforced(self):
        with pytest.raises(ValueError):
            Sequent((ParConj((P(), Q())),), P())

    def test_sublanguage_check(self):
        assert fm.is_int_formula(fm.parse_formula("!(P & Q) -> ?x.R(x)"))
        assert not fm.is_int_formula(fm.parse_formula("P -> Q"))
        assert not fm.is_int_formula(fm.parse_formula("~P"))
        assert fm.is_int_formula(int_impl(P(), Q()))


# ---------------------------------------------------------------------------
# Property tests

_leaf = st.sampled_from([P(), Q(), Atom("R", (Var("x"),)), Dollar(), Top(),
                         Bot(), Elem("p")])


def _combine(children):
    unary = st.one_of(
        children.map(Neg),
        children.map(Bang),
        children.map(lambda f: ChoiceAll("x", f)),
        children.map(lambda f: ChoiceExists("y", f)),
    )
    binary = st.tuples(children, children).flatmap(
        lambda ab: st.sampled_from([
            ParConj(ab), ParDisj(ab), Implies(*ab),
            ChoiceConj(ab), ChoiceDisj(ab)]))
    return st.one_of(unary, binary)


formulas = st.recursive(_leaf, _combine, max_leaves=8)


@settings(max_examples=150, deadline=None)
@given(formulas)
def test_render_parse_round_trip(f):
    assert fm.parse_formula(fm.render(f)) == f


@settings(max_examples=100, deadline=None)
@given(formulas)
def test_substituting_a_constant_eliminates_the_variable(f):
    g = fm.substitute(f, [("x", 7)])
    assert "x" not in fm.free_vars(g)


@settings(max_examples=100, deadline=None)
@given(formulas)
def test_free_vars_subset_of_all_vars(f):
    assert fm.free_vars(f) <= fm.all_vars(f)
