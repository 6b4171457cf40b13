"""Named winning strategies and strategy combinators.

Every strategy here is a one-pass reactive Machine: it scans the run once,
reacts only to environment moves, and never inspects the interpretation.
Each is documented by the shape of game it wins, in the surface grammar
(! is the reusable-resource modality, & / + the choice connectives,
@x / ?x the choice quantifiers).
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Optional

from . import formula as fm
from .epm import Machine, PlayContext, Strategy
from .formula import (Atom, ChoiceAll, ChoiceConj, ChoiceDisj,
                      ChoiceExists, Dollar, Formula, Implies)
from .games import bits_leq, grounded_atom_index, split_bang_move


def _numeral(s: str) -> Optional[int]:
    if s.isdigit() and not s.startswith("0"):
        return int(s)
    return None


# ---------------------------------------------------------------------------
# Mirroring strategies

class CcsMachine(Machine):
    """Copy-cat: wins F -> F by mirroring moves across the two components."""

    def on_env(self, move: str) -> list[str]:
        if move.startswith("1."):
            return ["2." + move[2:]]
        if move.startswith("2."):
            return ["1." + move[2:]]
        return []


class L6aMachine(Machine):
    """Wins !F -> F: copy-cat that keeps the whole antecedent at one branch,
    tagging every antecedent move with the root branch token."""

    def on_env(self, move: str) -> list[str]:
        if move.startswith("1.."):
            return ["2." + move[3:]]
        if move.startswith("2."):
            return ["1.." + move[2:]]
        return []


class L4Machine(Machine):
    """Wins !(F -> G) -> (!F -> !G).

    Replications of !G are echoed into !(F -> G) and !F so the three branch
    trees stay identical; within each branch the play is a double copy-cat
    pairing the F occurrences and the G occurrences.
    """

    def on_env(self, move: str) -> list[str]:
        if move.startswith("2.2."):
            parsed = split_bang_move(move[4:])
            if parsed is None:
                return []
            if parsed[0] == "rep":
                w = parsed[1]
                return [f"1.{w}:", f"2.1.{w}:"]
            w, alpha = parsed[1], parsed[2]
            return [f"1.{w}.2.{alpha}"]
        if move.startswith("2.1."):
            parsed = split_bang_move(move[4:])
            if parsed is None or parsed[0] != "node":
                return []
            w, alpha = parsed[1], parsed[2]
            return [f"1.{w}.1.{alpha}"]
        if move.startswith("1."):
            parsed = split_bang_move(move[2:])
            if parsed is None or parsed[0] != "node":
                return []
            w, beta = parsed[1], parsed[2]
            if beta.startswith("2."):
                return [f"2.2.{w}.{beta[2:]}"]
            if beta.startswith("1."):
                return [f"2.1.{w}.{beta[2:]}"]
        return []


class L4aMachine(Machine):
    """Wins !F1 /\\ ... /\\ !Fn -> !(F1 /\\ ... /\\ Fn): replications of the
    consequent broadcast to all n antecedent resources; component moves are
    transposed between "branch-then-index" and "index-then-branch" form."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need n >= 1")
        self.n = n

    def on_env(self, move: str) -> list[str]:
        if self.n == 1:
            # no conjunction wrapper on either side: plain mirroring
            if move.startswith("1.") or move.startswith("2."):
                other = "2." if move.startswith("1.") else "1."
                return [other + move[2:]]
            return []
        if move.startswith("2."):
            parsed = split_bang_move(move[2:])
            if parsed is None:
                return []
            if parsed[0] == "rep":
                w = parsed[1]
                return [f"1.{i}.{w}:" for i in range(1, self.n + 1)]
            w, alpha = parsed[1], parsed[2]
            head, dot, rest = alpha.partition(".")
            i = _numeral(head) if dot else None
            if i is None or i > self.n:
                return []
            return [f"1.{i}.{w}.{rest}"]
        if move.startswith("1."):
            head, dot, rest = move[2:].partition(".")
            i = _numeral(head) if dot else None
            if i is None or i > self.n:
                return []
            parsed = split_bang_move(rest)
            if parsed is None or parsed[0] != "node":
                return []
            w, alpha = parsed[1], parsed[2]
            return [f"2.{w}.{i}.{alpha}"]
        return []


class L6cMachine(Machine):
    """Wins !F -> !F /\\ !F: replicates the antecedent once, then routes
    branch 0 to the first conjunct, branch 1 to the second, broadcasting
    root-branch antecedent moves to both."""

    def start(self, ctx: PlayContext) -> list[str]:
        return ["1.:"]

    def on_env(self, move: str) -> list[str]:
        if move.startswith("1."):
            parsed = split_bang_move(move[2:])
            if parsed is None or parsed[0] != "node":
                return []
            w, alpha = parsed[1], parsed[2]
            if w == "":
                return [f"2.1..{alpha}", f"2.2..{alpha}"]
            rest = f"{w[1:]}.{alpha}"
            return ["2.1." + rest] if w[0] == "0" else ["2.2." + rest]
        if move.startswith("2.1.") or move.startswith("2.2."):
            bit = "0" if move[2] == "1" else "1"
            inner = move[4:]
            if split_bang_move(inner) is None:
                return []
            return [f"1.{bit}{inner}"]
        return []


# ---------------------------------------------------------------------------
# Choice-shuffling strategies

class _DelegatingMachine(Machine):
    """Base for strategies that finish by handing over to another machine."""

    def __init__(self):
        self.delegate: Optional[Machine] = None

    def _handover(self, machine: Machine, ctx: PlayContext) -> list[str]:
        self.delegate = machine
        return machine.start(ctx)

    @property
    def settled(self) -> bool:
        return self.delegate.settled if self.delegate is not None else True


class L11aMachine(_DelegatingMachine):
    """Wins !(F1 & ... & Fn) -> !Fi: resolves the antecedent choice at the
    root branch, then plays copy-cat."""

    def __init__(self, i: int, n: int):
        super().__init__()
        if not 1 <= i <= n or n < 2:
            raise ValueError("need n >= 2 and 1 <= i <= n")
        self.i = i
        self.n = n

    def start(self, ctx):
        return [f"1..{self.i}"] + self._handover(CcsMachine(), ctx)

    def on_env(self, move):
        return self.delegate.on_env(move)


class L11bMachine(_DelegatingMachine):
    """Wins !@x.G(x) -> !G(t): reads the value of t off the valuation,
    resolves the antecedent quantifier at the root branch, then copy-cat."""

    def __init__(self, t):
        super().__init__()
        self.t = fm.term(t)

    def start(self, ctx):
        c = ctx.valuation.term(self.t)
        return [f"1..{c}"] + self._handover(CcsMachine(), ctx)

    def on_env(self, move):
        return self.delegate.on_env(move)


class L11cMachine(_DelegatingMachine):
    """Wins !(F1 + ... + Fn) -> !F1 + ... + !Fn: waits for the environment's
    antecedent choice j, answers with the same consequent choice, then
    plays copy-cat."""

    def __init__(self, n: int):
        super().__init__()
        if n < 2:
            raise ValueError("need n >= 2")
        self.n = n
        self.ctx = None

    def start(self, ctx):
        self.ctx = ctx
        return []

    def on_env(self, move):
        if self.delegate is not None:
            return self.delegate.on_env(move)
        if move.startswith("1.."):
            j = _numeral(move[3:])
            if j is not None and j <= self.n:
                return [f"2.{j}"] + self._handover(CcsMachine(), self.ctx)
        return []


class L11dMachine(_DelegatingMachine):
    """Wins !?x.G(x) -> ?x.!G(x): waits for the environment's antecedent
    constant, repeats it in the consequent, then copy-cat."""

    def __init__(self):
        super().__init__()
        self.ctx = None

    def start(self, ctx):
        self.ctx = ctx
        return []

    def on_env(self, move):
        if self.delegate is not None:
            return self.delegate.on_env(move)
        if move.startswith("1.."):
            c = _numeral(move[3:])
            if c is not None:
                return [f"2.{c}"] + self._handover(CcsMachine(), self.ctx)
        return []


class Oct5aMachine(_DelegatingMachine):
    """Wins @x.(F(x) -> G(x)) -> (@x.F(x) -> @x.G(x)): waits for the
    environment's constant in the consequent, repeats it in the other two
    quantified components, then copy-cat."""

    def __init__(self):
        super().__init__()
        self.ctx = None

    def start(self, ctx):
        self.ctx = ctx
        return []

    def on_env(self, move):
        if self.delegate is not None:
            return self.delegate.on_env(move)
        if move.startswith("2.2."):
            c = _numeral(move[4:])
            if c is not None:
                return [f"1.{c}", f"2.1.{c}"] + self._handover(CcsMachine(), self.ctx)
        return []


class Oct5bMachine(_DelegatingMachine):
    """Wins F(t) -> ?x.F(x): resolves the consequent with the value of t,
    then copy-cat."""

    def __init__(self, t):
        super().__init__()
        self.t = fm.term(t)

    def start(self, ctx):
        c = ctx.valuation.term(self.t)
        return [f"2.{c}"] + self._handover(CcsMachine(), ctx)

    def on_env(self, move):
        return self.delegate.on_env(move)


class Oct5cMachine(_DelegatingMachine):
    """Wins F -> @x.F when F has no free x: waits for the environment's
    constant, replays any antecedent moves it buffered meanwhile, then
    copy-cat."""

    def __init__(self):
        super().__init__()
        self.buffered: list[str] = []
        self.ctx = None

    def start(self, ctx):
        self.ctx = ctx
        return []

    def on_env(self, move):
        if self.delegate is not None:
            return self.delegate.on_env(move)
        if move.startswith("1."):
            self.buffered.append(move[2:])
            return []
        if move.startswith("2."):
            c = _numeral(move[2:])
            if c is not None:
                replay = [f"2.{a}" for a in self.buffered]
                self.buffered = []
                return replay + self._handover(CcsMachine(), self.ctx)
        return []


class Oct5dMachine(_DelegatingMachine):
    """Wins @x.(F1(x) /\\ .. /\\ Fn(x) /\\ E(x) -> G(x))
         -> (@x.F1(x) /\\ .. /\\ @x.Fn(x) /\\ ?x.E(x) -> ?x.G(x)):
    waits for the environment's constant in the ?x.E component and repeats
    it everywhere, then copy-cat."""

    def __init__(self, n: int):
        super().__init__()
        if n < 0:
            raise ValueError("need n >= 0")
        self.n = n
        self.ctx = None

    def start(self, ctx):
        self.ctx = ctx
        return []

    def on_env(self, move):
        if self.delegate is not None:
            return self.delegate.on_env(move)
        trigger = "2.1." if self.n == 0 else f"2.1.{self.n + 1}."
        if move.startswith(trigger):
            c = _numeral(move[len(trigger):])
            if c is not None:
                replies = [f"2.2.{c}", f"1.{c}"]
                replies += [f"2.1.{i}.{c}" for i in range(1, self.n + 1)]
                return replies + self._handover(CcsMachine(), self.ctx)
        return []


class ExistsDropMachine(_DelegatingMachine):
    """Wins ?x.F -> F when F has no free x: waits for the environment's
    antecedent constant, replays buffered consequent moves into the
    antecedent, then copy-cat."""

    def __init__(self):
        super().__init__()
        self.buffered: list[str] = []
        self.ctx = None

    def start(self, ctx):
        self.ctx = ctx
        return []

    def on_env(self, move):
        if self.delegate is not None:
            return self.delegate.on_env(move)
        if move.startswith("2."):
            self.buffered.append(move[2:])
            return []
        if move.startswith("1."):
            c = _numeral(move[2:])
            if c is not None:
                replay = [f"1.{a}" for a in self.buffered]
                self.buffered = []
                return replay + self._handover(CcsMachine(), self.ctx)
        return []


def oct99_machine() -> Machine:
    """Renaming a choice-quantified variable changes nothing: copy-cat."""
    return CcsMachine()


# ---------------------------------------------------------------------------
# The universal-resource strategy

class L6bMachine(_DelegatingMachine):
    """Wins !$ -> K for any formula K of the sublanguage.

    Built by recursion on K: the universal resource in the antecedent is
    specialized to whichever conjunct matches K's head (atoms pick their
    index in the fixed grounded-atom enumeration; consequent choices are
    answered with 1, or follow the environment's pick), bottoming out in
    the !F -> F copy-cat.
    """

    def __init__(self, k: Formula):
        super().__init__()
        if not fm.is_int_formula(k):
            raise ValueError(f"not in the sublanguage: {fm.render(k)}")
        self.k = k
        self.ctx = None
        self.waiting = False

    def start(self, ctx):
        self.ctx = ctx
        k = self.k
        if isinstance(k, Dollar):
            return self._handover(L6aMachine(), ctx)
        if isinstance(k, Atom):
            args = tuple(ctx.valuation.term(t) for t in k.args)
            m = 1 + grounded_atom_index(ctx.signature, k.letter, args)
            return [f"1..{m}"] + self._handover(L6aMachine(), ctx)
        if isinstance(k, Implies):              # encoded resource implication
            e, f = k.left.body, k.right
            b_inst = _cl2("(R -> S) -> (R /\\ P -> S)")
            d_inst = _cl2("(R /\\ P -> S) -> (R -> (P -> S))")
            d = transitivity_machine(b_inst, d_inst)
            return self._handover(mp_machine([L6bMachine(f)], d), ctx)
        if isinstance(k, ChoiceDisj):
            return ["2.1"] + self._handover(L6bMachine(k.parts[0]), ctx)
        if isinstance(k, ChoiceExists):
            body = fm.substitute(k.body, [(k.var, 1)])
            return ["2.1"] + self._handover(L6bMachine(body), ctx)
        if isinstance(k, (ChoiceConj, ChoiceAll)):
            self.waiting = True
            return []
        raise ValueError(f"unsupported head in {fm.render(k)}")

    def on_env(self, move):
        if self.delegate is not None:
            return self.delegate.on_env(move)
        if not self.waiting or not move.startswith("2."):
            return []
        c = _numeral(move[2:])
        if c is None:
            return []
        k = self.k
        if isinstance(k, ChoiceConj):
            if c > len(k.parts):
                return []
            self.waiting = False
            return self._handover(L6bMachine(k.parts[c - 1]), self.ctx)
        body = fm.substitute(k.body, [(k.var, c)])
        self.waiting = False
        return self._handover(L6bMachine(body), self.ctx)


# ---------------------------------------------------------------------------
# The tree-of-trees strategy

ColoredBit = tuple[str, str]          # (content bit, color) with color b|y
ColoredString = tuple[ColoredBit, ...]

BLUE = "b"
YELLOW = "y"


def cb(bit: str, color: str) -> ColoredBit:
    if bit not in "01" or color not in (BLUE, YELLOW):
        raise ValueError("bad colored bit")
    return (bit, color)


def content(v: ColoredString) -> str:
    return "".join(bit for bit, _ in v)


def blue_content(v: ColoredString) -> str:
    return "".join(bit for bit, col in v if col == BLUE)


def yellow_content(v: ColoredString) -> str:
    return "".join(bit for bit, col in v if col == YELLOW)


def is_colored_tree(t: frozenset[ColoredString]) -> bool:
    """Contents form a tree, are injective, and sibling edges share color."""
    contents = {content(v) for v in t}
    if len(contents) != len(t):
        return False
    if "" not in contents:
        return False
    for c in contents:
        if c and c[:-1] not in contents:
            return False
        if (c + "0" in contents) != (c + "1" in contents):
            return False
    for v in t:
        for b0, b1 in ((BLUE, YELLOW), (YELLOW, BLUE)):
            if v + (("0", b0),) in t and v + (("1", b1),) in t:
                return False
    return True


def colored_tree_leaves(t: frozenset[ColoredString]) -> list[ColoredString]:
    contents = {content(v) for v in t}
    leaves = [v for v in t if content(v) + "0" not in contents]
    return sorted(leaves, key=content)


class L5Machine(Machine):
    """Wins !F -> !!F.

    The consequent's branches-of-branches are matched one-to-one with the
    antecedent's branches through a tree whose edges are colored: the blue
    subsequence of an antecedent branch names the outer consequent branch
    and the yellow subsequence names the inner one.  Outer replications
    split matching leaves with blue children, inner replications with
    yellow children; ordinary moves are copied between the matched
    branches.  Unrecognized environment moves park the machine in a
    permission-granting loop.
    """

    def __init__(self):
        self.tree: set[ColoredString] = {()}
        self.parked = False

    def _leaves(self) -> list[ColoredString]:
        return colored_tree_leaves(frozenset(self.tree))

    def on_env(self, move: str) -> list[str]:
        if self.parked:
            return []
        if move.startswith("2."):
            parsed = split_bang_move(move[2:])
            if parsed is None:
                self.parked = True
                return []
            if parsed[0] == "rep":                       # outer replication
                w = parsed[1]
                vs = [v for v in self._leaves() if blue_content(v) == w]
                out = [f"1.{content(v)}:" for v in vs]
                for v in vs:
                    self.tree.add(v + (("0", BLUE),))
                    self.tree.add(v + (("1", BLUE),))
                return out
            w, inner = parsed[1], parsed[2]
            parsed2 = split_bang_move(inner)
            if parsed2 is None:
                self.parked = True
                return []
            if parsed2[0] == "rep":                      # inner replication
                u = parsed2[1]
                vs = [v for v in self._leaves()
                      if bits_leq(w, blue_content(v)) and yellow_content(v) == u]
                out = [f"1.{content(v)}:" for v in vs]
                for v in vs:
                    self.tree.add(v + (("0", YELLOW),))
                    self.tree.add(v + (("1", YELLOW),))
                return out
            u, alpha = parsed2[1], parsed2[2]            # inner ordinary move
            vs = [v for v in self._leaves()
                  if bits_leq(w, blue_content(v)) and bits_leq(u, yellow_content(v))]
            return [f"1.{content(v)}.{alpha}" for v in vs]
        if move.startswith("1."):
            parsed = split_bang_move(move[2:])
            if parsed is None or parsed[0] != "node":
                self.parked = True
                return []
            w, alpha = parsed[1], parsed[2]
            vs = [v for v in self._leaves() if bits_leq(w, content(v))]
            return [f"2.{blue_content(v)}.{yellow_content(v)}.{alpha}" for v in vs]
        self.parked = True
        return []


# ---------------------------------------------------------------------------
# Combinators

class MpMachine(Machine):
    """Modus ponens composition.

    Given machines e1..en winning F1..Fn and c winning F1 /\\ .. /\\ Fn -> E,
    plays E: external moves go to c's consequent; c's antecedent moves are
    piped to the matching ei and the ei's moves are fed back to c.
    """

    MAX_RELAY = 10_000

    def __init__(self, parts: list[Machine], c: Machine):
        if not parts:
            raise ValueError("use the c machine directly when there are no parts")
        self.parts = list(parts)
        self.c = c

    @property
    def settled(self) -> bool:
        return self.c.settled and all(p.settled for p in self.parts)

    def _part_prefix(self, i: int) -> str:
        return "1." if len(self.parts) == 1 else f"1.{i + 1}."

    def start(self, ctx: PlayContext) -> list[str]:
        work = [("c", m) for m in self.c.start(ctx)]
        for i, p in enumerate(self.parts):
            work.extend(("p", i, m) for m in p.start(ctx))
        return self._pump(work)

    def on_env(self, move: str) -> list[str]:
        return self._pump([("c", m) for m in self.c.on_env("2." + move)])

    def _pump(self, work: list) -> list[str]:
        out: list[str] = []
        hops = 0
        while work:
            hops += 1
            if hops > self.MAX_RELAY:
                raise RuntimeError("relay loop in strategy composition")
            item = work.pop(0)
            if item[0] == "c":
                m = item[1]
                if m.startswith("2."):
                    out.append(m[2:])
                    continue
                if not m.startswith("1."):
                    raise RuntimeError(f"composition shape mismatch: {m!r}")
                if len(self.parts) == 1:
                    i, rest = 0, m[2:]
                else:
                    head, dot, rest = m[2:].partition(".")
                    i = int(head) - 1
                    if not dot or not 0 <= i < len(self.parts):
                        raise RuntimeError(f"composition shape mismatch: {m!r}")
                work.extend(("p", i, r) for r in self.parts[i].on_env(rest))
            else:
                _, i, m = item
                fed = self._part_prefix(i) + m
                work.extend(("c", r) for r in self.c.on_env(fed))
        return out


def mp_machine(parts: list[Machine], c: Machine) -> Machine:
    return c if not parts else MpMachine(parts, c)


def transitivity_machine(e1: Machine, e2: Machine) -> Machine:
    c = _cl2("(P -> Q) /\\ (Q -> S) -> (P -> S)")
    return MpMachine([e1, e2], c)


class BangClosureMachine(Machine):
    """Lifts a machine winning F to one winning !F: keeps one copy of the
    inner machine per branch, splitting the copy when its leaf replicates
    and broadcasting node moves to every branch below the node."""

    def __init__(self, inner: Machine):
        self.copies: dict[str, Machine] = {"": inner}
        self.started = False
        self.ctx = None

    @property
    def settled(self) -> bool:
        return all(m.settled for m in self.copies.values())

    def start(self, ctx: PlayContext) -> list[str]:
        self.ctx = ctx
        self.started = True
        return [f".{m}" for m in self.copies[""].start(ctx)]

    def on_env(self, move: str) -> list[str]:
        parsed = split_bang_move(move)
        if parsed is None:
            return []
        if parsed[0] == "rep":
            w = parsed[1]
            if w not in self.copies:
                return []
            original = self.copies.pop(w)
            self.copies[w + "0"] = original
            self.copies[w + "1"] = copy.deepcopy(original)
            return []
        w, alpha = parsed[1], parsed[2]
        out = []
        for u in sorted(self.copies):
            if bits_leq(w, u):
                out.extend(f"{u}.{r}" for r in self.copies[u].on_env(alpha))
        return out


class AllClosureMachine(Machine):
    """Lifts a machine winning F to one winning @x.F: waits for the
    environment's constant c and runs the inner machine with x valued c."""

    def __init__(self, inner: Machine, var: str):
        self.inner = inner
        self.var = var
        self.running = False
        self.ctx = None

    @property
    def settled(self) -> bool:
        return self.inner.settled if self.running else True

    def start(self, ctx: PlayContext) -> list[str]:
        self.ctx = ctx
        return []

    def on_env(self, move: str) -> list[str]:
        if self.running:
            return self.inner.on_env(move)
        c = _numeral(move)
        if c is None:
            return []
        self.running = True
        ctx2 = PlayContext(self.ctx.valuation.override(self.var, c),
                           self.ctx.signature)
        return self.inner.start(ctx2)


def _cl2(text: str) -> Machine:
    """Machine extracted from the decision procedure's proof of `text`."""
    from . import cl2
    return cl2.solution_machine(fm.parse_formula(text))


# ---------------------------------------------------------------------------
# Registry

def _build_l4a(args):
    return L4aMachine(int(args["n"]))


_REGISTRY = {
    "ccs": lambda args: CcsMachine(),
    "l6a": lambda args: L6aMachine(),
    "l4": lambda args: L4Machine(),
    "l4a": _build_l4a,
    "l6c": lambda args: L6cMachine(),
    "l6b": lambda args: L6bMachine(fm.parse_formula(args["K"])),
    "l11a": lambda args: L11aMachine(int(args["i"]), int(args["n"])),
    "l11b": lambda args: L11bMachine(args["t"]),
    "l11c": lambda args: L11cMachine(int(args["n"])),
    "l11d": lambda args: L11dMachine(),
    "oct5a": lambda args: Oct5aMachine(),
    "oct5b": lambda args: Oct5bMachine(args["t"]),
    "oct5c": lambda args: Oct5cMachine(),
    "oct5d": lambda args: Oct5dMachine(int(args["n"])),
    "oct99": lambda args: oct99_machine(),
    "exists_drop": lambda args: ExistsDropMachine(),
    "l5": lambda args: L5Machine(),
}


def registry_ids() -> list[str]:
    return sorted(_REGISTRY)


def parse_strategy_id(text: str) -> tuple[str, dict]:
    """Parse "name" or "name[k=v,k=v]" into (name, args)."""
    text = text.strip()
    if "[" not in text:
        return text, {}
    if not text.endswith("]"):
        raise ValueError(f"bad strategy id {text!r}")
    name, _, argpart = text[:-1].partition("[")
    args = {}
    depth = 0
    start = 0
    chunks = []
    for i, ch in enumerate(argpart):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == "," and depth == 0:
            chunks.append(argpart[start:i])
            start = i + 1
    chunks.append(argpart[start:])
    for chunk in chunks:
        if not chunk:
            continue
        k, eq, v = chunk.partition("=")
        if not eq:
            raise ValueError(f"bad strategy argument {chunk!r}")
        args[k.strip()] = v.strip()
    return name, args


def build_machine(strategy_id: str) -> Machine:
    name, args = parse_strategy_id(strategy_id)
    if name not in _REGISTRY:
        raise KeyError(f"unknown strategy {name!r}; known: {registry_ids()}")
    return _REGISTRY[name](args)


def build_strategy(strategy_id: str) -> Strategy:
    return Strategy(build_machine(strategy_id))


# ---------------------------------------------------------------------------
# Combinator expressions (the compiler's output language)

@dataclass(frozen=True)
class Expr:
    """A lazily evaluated strategy expression over the registry.

    kinds: "reg" (payload: id string), "mp" (children: parts + c last),
    "trans" (2 children), "bang"/"allx" (1 child; allx carries the
    variable in payload), "cl2" (payload: the proved formula's rendering).
    """
    kind: str
    payload: str = ""
    children: tuple["Expr", ...] = ()

    def __str__(self) -> str:
        if self.kind == "reg":
            return self.payload
        if self.kind == "cl2":
            return "cl2{" + self.payload + "}"
        if self.kind == "allx":
            return f"all[{self.payload}](" + str(self.children[0]) + ")"
        inner = ",".join(str(c) for c in self.children)
        return f"{self.kind}({inner})"

    def build(self) -> Machine:
        if self.kind == "reg":
            return build_machine(self.payload)
        if self.kind == "cl2":
            return _cl2(self.payload)
        if self.kind == "mp":
            *parts, c = [e.build() for e in self.children]
            return mp_machine(parts, c)
        if self.kind == "trans":
            e1, e2 = [e.build() for e in self.children]
            return transitivity_machine(e1, e2)
        if self.kind == "bang":
            return BangClosureMachine(self.children[0].build())
        if self.kind == "allx":
            return AllClosureMachine(self.children[0].build(), self.payload)
        raise ValueError(f"unknown expression kind {self.kind!r}")

    def strategy(self) -> Strategy:
        return Strategy(self.build())


def reg(strategy_id: str) -> Expr:
    return Expr("reg", strategy_id)


def mp(parts: list[Expr], c: Expr) -> Expr:
    if not parts:
        return c
    return Expr("mp", children=tuple(parts) + (c,))


def trans(e1: Expr, e2: Expr) -> Expr:
    return Expr("trans", children=(e1, e2))


def bang(e: Expr) -> Expr:
    return Expr("bang", children=(e,))


def allx(e: Expr, var: str) -> Expr:
    return Expr("allx", var, (e,))


def cl2_expr(f: Formula) -> Expr:
    return Expr("cl2", fm.render(f))
