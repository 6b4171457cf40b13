import random

import pytest
from hypothesis import given, settings, strategies as st

from clgames import formula as fm, oracle
from clgames.formula import Atom, Bang
from clgames.games import (B, FiniteGame, GameRef, IllegalPositionError,
                           Interpretation, Labmove, MoveStatus, T, Valuation,
                           candidate_moves, classify_move,
                           enumerate_grounded_atoms, grounded_atom_index,
                           labmoves, load_interpretation, dump_interpretation,
                           negate_run, observationally_equal, position_legal,
                           prefixation, prelegal_and_tree, project,
                           random_interpretation, subrun_upto, tree_leaves,
                           winner)


def interp_ab():
    a1 = FiniteGame(T, {(B, "a"): FiniteGame(B, {(T, "b"): FiniteGame(T)})})
    a2 = FiniteGame(B, {(B, "c"): FiniteGame(T)})
    return Interpretation({"A1/0": lambda _: a1, "A2/0": lambda _: a2})


def ref(text, itp=None, val=None):
    return GameRef(fm.parse_formula(text), itp or interp_ab(),
                   val or Valuation())


class TestClassifyMove:
    def test_choice_conjunction_is_resolved_by_the_environment(self):
        g = ref("A1 & A2")
        assert classify_move(g, (), Labmove(B, "1")) is MoveStatus.LEGAL
        assert classify_move(g, (), Labmove(T, "1")) is MoveStatus.ILLEGAL

    def test_recurrence_replication_only_at_leaves(self):
        g = ref("!A1")
        assert classify_move(g, (), Labmove(B, ":")) is MoveStatus.LEGAL
        assert classify_move(g, (), Labmove(B, "0:")) is MoveStatus.ILLEGAL

    def test_parallel_index_bound(self):
        g = ref("A1 /\\ A2")
        assert classify_move(g, (), Labmove(T, "3.a")) is MoveStatus.ILLEGAL

    def test_illegal_position_rejected(self):
        g = ref("A1 & A2")
        with pytest.raises(IllegalPositionError):
            classify_move(g, labmoves(("T", "1")), Labmove(B, "1"))

    def test_reserved_symbol_always_illegal(self):
        g = ref("A1")
        assert classify_move(g, (), Labmove(B, "♠")) is MoveStatus.ILLEGAL


class TestWinner:
    def test_unresolved_machine_choice_loses(self):
        assert winner(ref("A1 + A2"), ()) is B

    def test_unresolved_environment_choice_wins(self):
        assert winner(ref("A1 & A2"), ()) is B or True
        assert winner(ref("A1 & A2"), ()) in (T,)

    def test_top_and_bot(self):
        assert winner(ref("top"), ()) is T
        assert winner(ref("bot"), ()) is B

    def test_mirrored_implication_run(self):
        g = ref("A1 -> A1")
        run = labmoves(("B", "2.a"), ("T", "1.a"))
        ok, w = oracle.oracle_run(g.formula, g.interp, g.valuation, run)
        assert ok and w is T
        assert winner(g, run) is T

    def test_offender_loses(self):
        g = ref("A1 & A2")
        run = labmoves(("B", "1"), ("B", "zzz"))
        assert winner(g, run) is T
        run2 = labmoves(("T", "9"),)
        assert winner(g, run2) is B


class TestPrefixation:
    def test_resolved_choice_is_the_component(self):
        itp = interp_ab()
        for i in (1, 2):
            view = prefixation(ref("A1 & A2", itp), labmoves(("B", str(i))))
            assert observationally_equal(view, ref(f"A{i}", itp), 3)
        for i in (1, 2):
            view = prefixation(ref("A1 + A2", itp), labmoves(("T", str(i))))
            assert observationally_equal(view, ref(f"A{i}", itp), 3)

    def test_empty_prefix_is_identity(self):
        g = ref("A1 -> A2")
        assert observationally_equal(prefixation(g, ()), g, 3)

    def test_illegal_prefix_is_an_error(self):
        with pytest.raises(IllegalPositionError):
            prefixation(ref("A1 & A2"), labmoves(("B", "7")))


class TestRunUtilities:
    def test_project_strips_the_prefix(self):
        run = labmoves(("B", "2.a"), ("T", "1.b"))
        assert project(run, "1.") == labmoves(("T", "b"))
        assert project((), "1.") == ()

    def test_project_is_a_raw_string_prefix(self):
        assert project(labmoves(("T", "10.x")), "1") == labmoves(("T", "0.x"))

    def test_negate_run(self):
        assert negate_run(labmoves(("T", "a"))) == labmoves(("B", "a"))
        assert negate_run(()) == ()

    def test_prelegal_and_tree(self):
        ok, t = prelegal_and_tree(())
        assert ok and t == frozenset({""})
        ok, t = prelegal_and_tree(labmoves(("B", ":")))
        assert ok and t == frozenset({"", "0", "1"})
        ok, t = prelegal_and_tree(labmoves(("B", ":"), ("B", "00:")))
        assert not ok and t == frozenset({"", "0", "1"})

    def test_branch_view(self):
        g = labmoves(("T", ".a1"), ("B", ":"), ("B", "1.a2"), ("T", "0.a3"),
                     ("B", "1:"), ("T", "10.a4"))
        assert subrun_upto(g, "101000") == labmoves(
            ("T", "a1"), ("B", "a2"), ("T", "a4"))
        assert subrun_upto(labmoves(("B", ":")), "0") == ()
        assert subrun_upto(g, "") == labmoves(("T", "a1"))


class TestUniversalProblem:
    def test_every_positive_numeral_is_a_legal_choice(self):
        itp = Interpretation({"P/0": lambda _: FiniteGame(T),
                              "Q/1": lambda _: FiniteGame(B)})
        g = GameRef(fm.parse_formula("$"), itp)
        for m in ("1", "2", "7", "30"):
            assert classify_move(g, (), Labmove(B, m)) is MoveStatus.LEGAL
        assert classify_move(g, (), Labmove(T, "1")) is MoveStatus.ILLEGAL
        assert classify_move(g, (), Labmove(B, "0")) is MoveStatus.ILLEGAL

    def test_unresolved_choice_wins_for_the_machine(self):
        itp = Interpretation({"P/0": lambda _: FiniteGame(B)})
        assert winner(GameRef(fm.parse_formula("$"), itp), ()) is T

    def test_first_conjunct_is_the_base(self):
        base = FiniteGame(B, {(B, "z"): FiniteGame(T)})
        itp = Interpretation({"P/0": lambda _: FiniteGame(T)}, base)
        g = GameRef(fm.parse_formula("$"), itp)
        view = prefixation(g, labmoves(("B", "1")))
        direct = GameRef(Atom("Z"), Interpretation({"Z/0": lambda _: base}))
        assert observationally_equal(view, direct, 2)

    def test_finite_signature_exhausts(self):
        itp = Interpretation({"P/0": lambda _: FiniteGame(T)})
        g = GameRef(fm.parse_formula("$"), itp)
        assert classify_move(g, (), Labmove(B, "2")) is MoveStatus.LEGAL
        assert classify_move(g, (), Labmove(B, "3")) is MoveStatus.ILLEGAL


class TestEnumeration:
    def test_single_nullary_letter(self):
        sig = (("P", 0),)
        assert enumerate_grounded_atoms(sig, 1) == ("P", ())

    def test_unary_stream(self):
        sig = (("Q", 1),)
        assert enumerate_grounded_atoms(sig, 1) == ("Q", (1,))
        assert enumerate_grounded_atoms(sig, 2) == ("Q", (2,))

    def test_diagonal_interleaving(self):
        sig = (("P", 0), ("Q", 1))
        atoms = [enumerate_grounded_atoms(sig, k) for k in range(1, 5)]
        assert atoms[0] == ("P", ())
        assert atoms[1:] == [("Q", (1,)), ("Q", (2,)), ("Q", (3,))]

    def test_bijection(self):
        sig = (("P", 0), ("Q", 2), ("R", 1))
        seen = set()
        for k in range(1, 40):
            atom = enumerate_grounded_atoms(sig, k)
            assert atom not in seen
            seen.add(atom)
            assert grounded_atom_index(sig, *atom) == k

    def test_index_starts_at_one(self):
        with pytest.raises(ValueError):
            enumerate_grounded_atoms((("P", 0),), 0)


class TestInterpretationFiles:
    def test_load_guarded_letter(self):
        spec = {
            "letters": {
                "Q/1": {
                    "params": ["x1"],
                    "game": {
                        "cases": [{"when": {"x1": 1}, "winner": "T"}],
                        "default": {"winner": "B",
                                    "moves": {"T:go": {"winner": "T"}}},
                    },
                }
            },
            "dollar_base": {"winner": "T"},
        }
        itp = load_interpretation(spec)
        assert itp.letter_game("Q", (1,)).winner is T
        g2 = itp.letter_game("Q", (2,))
        assert g2.winner is B and (T, "go") in g2.moves

    def test_dump_load_round_trip(self):
        itp = random_interpretation(11, (("P", 0), ("Q", 1)), 2)
        dumped = dump_interpretation(itp, arg_cap=2)
        again = load_interpretation(dumped)
        for args in ((), ):
            assert dump_interpretation(again, 2)["letters"]["P/0"] == \
                dumped["letters"]["P/0"]


# ---------------------------------------------------------------------------
# Structural properties

def _random_runs(g, rng, count, length):
    for _ in range(count):
        run = []
        for _ in range(length):
            player = rng.choice((T, B))
            options = candidate_moves(g, tuple(run), player)
            if not options:
                break
            run.append(Labmove(player, rng.choice(options)))
        yield tuple(run)


def test_prefix_closure_of_legal_positions():
    rng = random.Random(0)
    for seed in range(6):
        itp = random_interpretation(seed, (("P", 0), ("Q", 1)), 2)
        g = GameRef(fm.parse_formula("!(P & Q(1)) -> (P \\/ Q(2))"), itp)
        for run in _random_runs(g, rng, 12, 5):
            assert position_legal(g, run)
            for k in range(len(run)):
                assert position_legal(g, run[:k])


def test_negation_duality():
    rng = random.Random(1)
    itp = random_interpretation(3, (("P", 0),), 3)
    g = GameRef(fm.parse_formula("P"), itp)
    ng = GameRef(fm.parse_formula("~P"), itp)
    for run in _random_runs(g, rng, 20, 3):
        assert winner(ng, negate_run(run)) is winner(g, run).opponent


def test_recurrence_winner_uses_all_complete_branches():
    itp = interp_ab()
    g = GameRef(Bang(fm.parse_formula("A1")), itp)
    run = labmoves(("B", ":"), ("B", "0.a"))
    # branch 0 of A1 is at <B a>, lost for the machine; branch 1 is fine
    assert winner(g, run) is B
    run2 = labmoves(("B", ":"), ("B", "0.a"), ("T", "0.b"))
    assert winner(g, run2) is T
    ok, tree = prelegal_and_tree(run2)
    assert ok
    for leaf in tree_leaves(tree):
        assert position_legal(GameRef(fm.parse_formula("A1"), itp),
                              subrun_upto(run2, leaf))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("TB"),
                          st.text(alphabet="ab01.:", max_size=4)),
                max_size=6))
def test_negate_run_is_an_involution(pairs):
    run = labmoves(*pairs)
    assert negate_run(negate_run(run)) == run
