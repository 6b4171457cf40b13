import pytest

from clgames import formula as fm
from clgames.epm import (PlayContext, RandomEnv, ScriptEnv, Strategy,
                         simulate, wins_against_all)
from clgames.games import (B, FiniteGame, GameRef, Interpretation, T,
                           Valuation, random_interpretation)
from clgames.strategies import (AllClosureMachine, BangClosureMachine,
                                CcsMachine, L5Machine, Machine, MpMachine,
                                blue_content, build_machine, build_strategy,
                                colored_tree_leaves, content, is_colored_tree,
                                parse_strategy_id, transitivity_machine,
                                yellow_content)

CTX = PlayContext(Valuation({"y": 4}), (("P", 0), ("Q", 0), ("R", 1)))


def feed(machine: Machine, *moves: str, ctx: PlayContext = CTX):
    """Start a machine and return [initial burst, burst per env move...]."""
    bursts = [machine.start(ctx)]
    for m in moves:
        bursts.append(machine.on_env(m))
    return bursts


class TestMirrors:
    def test_ccs_mirrors_both_ways(self):
        m = build_machine("ccs")
        assert feed(m, "2.a", "1.x", "2.y") == [[], ["1.a"], ["2.x"], ["1.y"]]

    def test_ccs_ignores_unrecognized(self):
        m = build_machine("ccs")
        assert feed(m, "junk") == [[], []]

    def test_l6a_tags_antecedent_moves_with_the_root_branch(self):
        m = build_machine("l6a")
        assert feed(m, "2.m", "1..n") == [[], ["1..m"], ["2.n"]]

    def test_l4_replication_case(self):
        m = build_machine("l4")
        assert feed(m, "2.2.:")[1] == ["1.:", "2.1.:"]
        assert feed(build_machine("l4"), "2.2.w:".replace("w", "0"))[1] == \
            ["1.0:", "2.1.0:"]

    def test_l4_component_transpositions(self):
        m = build_machine("l4")
        assert m.on_env("2.2.0.a") == ["1.0.2.a"]
        assert m.on_env("1.0.2.a") == ["2.2.0.a"]
        assert m.on_env("2.1.0.a") == ["1.0.1.a"]
        assert m.on_env("1.0.1.a") == ["2.1.0.a"]

    def test_l4a_broadcast_and_transpose(self):
        m = build_machine("l4a[n=2]")
        assert m.on_env("2.:") == ["1.1.:", "1.2.:"]
        assert m.on_env("2.0.2.a") == ["1.2.0.a"]
        assert m.on_env("1.1.0.a") == ["2.0.1.a"]

    def test_l4a_unary_degenerates_to_mirroring(self):
        m = build_machine("l4a[n=1]")
        assert m.on_env("2.:") == ["1.:"]
        assert m.on_env("2.0.a") == ["1.0.a"]

    def test_l6c_replicates_then_routes(self):
        m = build_machine("l6c")
        assert m.start(CTX) == ["1.:"]
        assert m.on_env("2.1..a") == ["1.0.a"]
        assert m.on_env("2.2..a") == ["1.1.a"]
        assert m.on_env("1.0.a") == ["2.1..a"]
        assert m.on_env("1..a") == ["2.1..a", "2.2..a"]


class TestChoiceShufflers:
    def test_l11a_resolves_then_copies(self):
        m = build_machine("l11a[i=2,n=3]")
        assert m.start(CTX) == ["1..2"]
        assert m.on_env("2.w.a".replace("w", "0")) == ["1.0.a"]

    def test_l11b_reads_the_valuation(self):
        assert build_machine("l11b[t=3]").start(CTX) == ["1..3"]
        assert build_machine("l11b[t=y]").start(CTX) == ["1..4"]

    def test_l11c_answers_the_environments_pick(self):
        m = build_machine("l11c[n=2]")
        assert m.start(CTX) == []
        assert m.on_env("1..2") == ["2.2"]
        assert m.on_env("2.m") == ["1.m"]

    def test_l11d_repeats_the_constant(self):
        m = build_machine("l11d")
        assert feed(m, "1..7")[1] == ["2.7"]

    def test_oct5a_repeats_the_constant_twice(self):
        m = build_machine("oct5a")
        assert feed(m, "2.2.5")[1] == ["1.5", "2.1.5"]

    def test_oct5b_moves_first(self):
        assert build_machine("oct5b[t=4]").start(CTX) == ["2.4"]
        assert build_machine("oct5b[t=y]").start(CTX) == ["2.4"]

    def test_oct5c_buffers_and_replays(self):
        m = build_machine("oct5c")
        assert feed(m, "1.a", "1.b", "2.9")[1:] == [[], [], ["2.a", "2.b"]]
        assert m.on_env("2.x") == ["1.x"]       # copy-cat afterwards

    def test_oct5d_fans_the_constant_out(self):
        m = build_machine("oct5d[n=1]")
        assert feed(m, "2.1.2.5")[1] == ["2.2.5", "1.5", "2.1.1.5"]
        m0 = build_machine("oct5d[n=0]")
        assert feed(m0, "2.1.5")[1] == ["2.2.5", "1.5"]

    def test_exists_drop_replays_into_the_antecedent(self):
        m = build_machine("exists_drop")
        assert feed(m, "2.a", "1.7")[1:] == [[], ["1.a"]]


class TestL6b:
    def test_dollar_behaves_as_the_root_copy_cat(self):
        m = build_machine("l6b[K=$]")
        assert m.start(CTX) == []
        assert m.on_env("2.m") == ["1..m"]

    def test_atom_picks_its_enumeration_conjunct(self):
        # signature (P,0),(Q,0),(R,1): atoms P, Q, R(1), R(2), ...
        m = build_machine("l6b[K=Q]")
        assert m.start(CTX) == ["1..3"]
        m2 = build_machine("l6b[K=R(2)]")
        assert m2.start(CTX) == ["1..5"]
        m3 = build_machine("l6b[K=R(y)]")     # y valued 4 by the context
        assert m3.start(CTX) == ["1..7"]

    def test_choice_disjunction_picks_the_first_component(self):
        m = build_machine("l6b[K=P + Q]")
        assert m.start(CTX) == ["2.1", "1..2"]

    def test_choice_conjunction_waits(self):
        m = build_machine("l6b[K=P & Q]")
        assert m.start(CTX) == []
        assert m.on_env("2.2") == ["1..3"]

    def test_quantifiers(self):
        m = build_machine("l6b[K=?x.R(x)]")
        assert m.start(CTX) == ["2.1", "1..4"]   # witnesses 1; R(1) is atom 4
        m2 = build_machine("l6b[K=@x.R(x)]")
        assert m2.start(CTX) == []
        assert m2.on_env("2.2") == ["1..5"]      # R(2) is atom 5

    def test_rejects_non_sublanguage(self):
        with pytest.raises(ValueError):
            build_machine("l6b[K=~P]")


class TestColoredTrees:
    def test_colored_contents(self):
        v = (("1", "b"), ("0", "y"), ("0", "y"), ("0", "b"), ("1", "y"))
        assert content(v) == "10001"
        assert blue_content(v) == "10"
        assert yellow_content(v) == "001"

    def test_tree_conditions(self):
        assert is_colored_tree(frozenset({()}))
        good = frozenset({(), (("0", "b"),), (("1", "b"),)})
        assert is_colored_tree(good)
        mixed = frozenset({(), (("0", "b"),), (("1", "y"),)})
        assert not is_colored_tree(mixed)
        not_injective = frozenset({(), (("0", "b"),), (("1", "b"),),
                                   (("0", "y"),)})
        assert not is_colored_tree(not_injective)

    def test_leaves_sorted_by_content(self):
        t = frozenset({(), (("0", "b"),), (("1", "b"),)})
        assert [content(v) for v in colored_tree_leaves(t)] == ["0", "1"]


class TestL5:
    def test_outer_replication_splits_blue(self):
        m = L5Machine()
        assert feed(m, "2.:")[1] == ["1.:"]
        assert sorted(content(v) for v in colored_tree_leaves(
            frozenset(m.tree))) == ["0", "1"]
        assert all(v[-1][1] == "b" for v in m.tree if v)

    def test_inner_replication_splits_yellow(self):
        m = L5Machine()
        m.start(CTX)
        assert m.on_env("2..:") == ["1.:"]
        assert all(v[-1][1] == "y" for v in m.tree if v)

    def test_consequent_move_copies_to_matching_leaves(self):
        m = L5Machine()
        m.start(CTX)
        m.on_env("2.:")
        assert m.on_env("2.0..a") == ["1.0.a"]
        assert m.on_env("2...b") == ["1.0.b", "1.1.b"]

    def test_antecedent_move_translates_to_branch_pairs(self):
        m = L5Machine()
        m.start(CTX)
        m.on_env("2.:")
        assert m.on_env("1.0.a") == ["2.0..a"]
        assert m.on_env("1..c") == ["2.0..c", "2.1..c"]

    def test_unrecognized_move_parks(self):
        m = L5Machine()
        m.start(CTX)
        m.on_env("2.")
        assert m.parked
        assert m.on_env("2.:") == []


class TestCombinators:
    def test_mp_with_no_parts_is_the_composer_itself(self):
        from clgames.strategies import mp_machine
        m = CcsMachine()
        assert mp_machine([], m) is m

    def test_mp_routes_between_parts_and_the_composer(self):
        class Responder(Machine):
            def on_env(self, move):
                return ["b"] if move == "a" else []
        comp = MpMachine([Responder()], CcsMachine())
        assert feed(comp, "a")[1] == ["b"]

    def test_mp_shape_mismatch_is_loud(self):
        class BadComposer(Machine):
            def on_env(self, move):
                return ["zzz"]          # no component prefix
        comp = MpMachine([CcsMachine()], BadComposer())
        with pytest.raises(RuntimeError):
            feed(comp, "a")

    def test_transitivity_of_two_copy_cats_is_a_copy_cat(self):
        m = transitivity_machine(CcsMachine(), CcsMachine())
        bursts = feed(m, "2.a", "1.x")
        assert bursts[1] == ["1.a"] and bursts[2] == ["2.x"]

    def test_transitivity_chain_stress(self):
        m = transitivity_machine(
            transitivity_machine(CcsMachine(), CcsMachine()),
            transitivity_machine(CcsMachine(), CcsMachine()))
        itp = random_interpretation(9, (("P", 0),), 3)
        g = GameRef(fm.parse_formula("P -> P"), itp)
        for seed in range(40):
            t = simulate(Strategy(m).clone(), RandomEnv(seed), g)
            assert t.verdict is T
        res = wins_against_all(Strategy(m), g, depth=2)
        assert res.won_all

    def test_bang_closure_single_branch_prefixes_the_root(self):
        class Responder(Machine):
            def on_env(self, move):
                return ["b"] if move == "a" else []
        m = BangClosureMachine(Responder())
        assert feed(m, ".a")[1] == [".b"]

    def test_bang_closure_replication_duplicates_state(self):
        class Echo(Machine):
            def __init__(self):
                self.seen = 0

            def on_env(self, move):
                self.seen += 1
                return [f"r{self.seen}"]
        m = BangClosureMachine(Echo())
        m.start(CTX)
        m.on_env(".x")                          # seen=1 at the root copy
        m.on_env(":")                           # split
        assert sorted(m.copies) == ["0", "1"]
        assert m.copies["0"].seen == 1 and m.copies["1"].seen == 1
        out = m.on_env("0.x")
        assert out == ["0.r2"]
        assert m.copies["1"].seen == 1          # untouched sibling

    def test_bang_closure_broadcasts_node_moves(self):
        class Echo(Machine):
            def on_env(self, move):
                return ["k"]
        m = BangClosureMachine(Echo())
        m.start(CTX)
        m.on_env(":")
        assert m.on_env(".x") == ["0.k", "1.k"]

    def test_bang_closure_wins_recurrence_of_a_won_game(self):
        class Responder(Machine):
            def on_env(self, move):
                return ["b"] if move == "a" else []
        a = FiniteGame(T, {(B, "a"): FiniteGame(B, {(T, "b"): FiniteGame(T)})})
        itp = Interpretation({"A/0": lambda _: a})
        g = GameRef(fm.parse_formula("!A"), itp)
        res = wins_against_all(Strategy(BangClosureMachine(Responder())), g,
                               depth=2)
        assert res.won_all

    def test_all_closure_runs_the_inner_machine_at_the_chosen_constant(self):
        inners = []

        class Probe(Machine):
            def start(self, ctx):
                inners.append(ctx.valuation.var("x"))
                return []
        m = AllClosureMachine(Probe(), "x")
        feed(m, "5")
        assert inners == [5]

    def test_all_closure_wins_when_the_environment_never_chooses(self):
        itp = random_interpretation(2, (("R", 1),), 2)
        g = GameRef(fm.parse_formula("@x.R(x)"), itp)
        t = simulate(Strategy(AllClosureMachine(Machine(), "x")),
                     ScriptEnv(["stop"]), g)
        assert t.verdict is T


class TestLoopInvariants:
    def test_root_copy_cat_keeps_the_runs_dual(self):
        # at every permission point of the !A -> A copy-cat: the antecedent
        # moves all sit at the root branch, and the root-branch view is the
        # label-dual of the consequent run
        from clgames.games import negate_run, project, random_interpretation

        itp = random_interpretation(6, (("A", 0),), 3)
        g = GameRef(fm.parse_formula("!A -> A"), itp)
        failures = []

        def on_grant(run):
            ante = project(run, "1.")
            if not all(lm.move.startswith(".") for lm in ante):
                failures.append(("prefix", run))
            if project(run, "1..") != negate_run(project(run, "2.")):
                failures.append(("dual", run))

        for seed in range(25):
            t = simulate(build_strategy("l6a"), RandomEnv(seed), g,
                         on_grant=on_grant)
            assert t.verdict is T
        assert not failures

    def test_l5_invariant_checker_detects_tampering(self):
        from clgames.verify import check_l5_invariants

        itp = random_interpretation(6, (("P", 0),), 3)
        g = GameRef(fm.parse_formula("!P -> !!P"), itp)
        m = L5Machine()
        strat = Strategy(m)
        env = ScriptEnv([("move", "2.:"), "stop"])
        t = simulate(strat, env, g)
        assert t.verdict is T
        assert check_l5_invariants(t.run, m.tree, g) == []
        # drop a leaf from the record: the bijection clauses must fire
        broken = set(m.tree)
        broken.discard((("0", "b"),))
        assert check_l5_invariants(t.run, broken, g)


class TestRegistry:
    def test_parse_ids(self):
        assert parse_strategy_id("ccs") == ("ccs", {})
        assert parse_strategy_id("l11a[i=2,n=3]") == ("l11a",
                                                      {"i": "2", "n": "3"})
        assert parse_strategy_id("l6b[K=R(1,2)]")[1] == {"K": "R(1,2)"}

    def test_unknown_id_rejected(self):
        with pytest.raises(KeyError):
            build_machine("nope")

    def test_registry_builds_fresh_state(self):
        a = build_strategy("l6c")
        b = build_strategy("l6c")
        assert a.machine is not b.machine
