"""Sequent calculus: rule checking and compilation to winning strategies.

A proof is a tree of sequents.  check_proof validates every node against
its rule's schema and side conditions (eigenvariable freshness, term
free-for-variable, index bounds).  compile maps a checked proof to a
strategy expression for the sequent read as a formula; each rule case
composes the named strategies with extracted propositional solutions via
modus ponens and transitivity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import formula as fm
from .formula import (Atom, Bang, ChoiceAll, ChoiceConj, ChoiceDisj,
                      ChoiceExists, Dollar, Formula, Implies, ParConj,
                      Sequent, Var, par_conj)
from .strategies import Expr, allx, bang, cl2_expr, mp, reg, trans

RULES = ("Identity", "Domination", "Exchange", "Weakening", "Contraction",
         "RightImpl", "LeftImpl",
         "RightChoiceConj", "LeftChoiceConj",
         "RightChoiceDisj", "LeftChoiceDisj",
         "RightChoiceAll", "LeftChoiceAll",
         "RightChoiceExists", "LeftChoiceExists")


@dataclass(frozen=True)
class ProofNode:
    sequent: Sequent
    rule: str
    children: tuple["ProofNode", ...] = ()
    i: int = 0            # component index (LeftChoiceConj / RightChoiceDisj)
    t: str = ""           # term text (LeftChoiceAll / RightChoiceExists)
    y: str = ""           # eigenvariable (RightChoiceAll / LeftChoiceExists)
    pos: int = -1         # swap position (Exchange)

    def __deepcopy__(self, memo):
        return self

    def count_nodes(self) -> int:
        return 1 + sum(c.count_nodes() for c in self.children)

    def rules_used(self) -> frozenset[str]:
        out = frozenset({self.rule})
        for c in self.children:
            out |= c.rules_used()
        return out


def _seq_vars(s: Sequent) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for g in s.context + (s.succedent,):
        out |= fm.all_vars(g)
    return out


def check_rule(node: ProofNode) -> tuple[bool, str]:
    """Validate one node's schema match and side conditions."""
    s = node.sequent
    kids = node.children
    rule = node.rule

    def bad(msg: str) -> tuple[bool, str]:
        return False, f"{rule} at {fm.render_sequent(s)}: {msg}"

    if rule not in RULES:
        return bad("unknown rule")

    if rule == "Identity":
        if kids:
            return bad("takes no premises")
        if s.context != (s.succedent,):
            return bad("conclusion must be K => K")
        return True, ""

    if rule == "Domination":
        if kids:
            return bad("takes no premises")
        if s.context != (Dollar(),):
            return bad("conclusion must be $ => K")
        return True, ""

    if rule == "Exchange":
        if len(kids) != 1:
            return bad("takes one premise")
        p = kids[0].sequent
        k = node.pos
        if not 0 <= k < len(p.context) - 1:
            return bad("swap position out of range")
        ctx = list(p.context)
        ctx[k], ctx[k + 1] = ctx[k + 1], ctx[k]
        if s != Sequent(tuple(ctx), p.succedent):
            return bad("conclusion is not the premise with adjacent swap")
        return True, ""

    if rule == "Weakening":
        if len(kids) != 1:
            return bad("takes one premise")
        p = kids[0].sequent
        if not s.context or s.context[:-1] != p.context \
                or s.succedent != p.succedent:
            return bad("conclusion must append one formula to the context")
        return True, ""

    if rule == "Contraction":
        if len(kids) != 1:
            return bad("takes one premise")
        p = kids[0].sequent
        if not s.context or p.context != s.context + (s.context[-1],) \
                or s.succedent != p.succedent:
            return bad("premise must duplicate the conclusion's last formula")
        return True, ""

    if rule == "RightImpl":
        if len(kids) != 1:
            return bad("takes one premise")
        p = kids[0].sequent
        succ = s.succedent
        if not (isinstance(succ, Implies) and isinstance(succ.left, Bang)):
            return bad("succedent must be a resource implication")
        f, k = succ.left.body, succ.right
        if p != Sequent(s.context + (f,), k):
            return bad("premise must move the antecedent into the context")
        return True, ""

    if rule == "LeftImpl":
        if len(kids) != 2:
            return bad("takes two premises")
        p1, p2 = kids[0].sequent, kids[1].sequent
        if not s.context:
            return bad("conclusion needs the implication in its context")
        last = s.context[-1]
        if not (isinstance(last, Implies) and isinstance(last.left, Bang)):
            return bad("last context formula must be a resource implication")
        k2, f = last.left.body, last.right
        if p2.succedent != k2:
            return bad("second premise must prove the implication's antecedent")
        if not p1.context or p1.context[-1] != f:
            return bad("first premise must use the implication's consequent")
        g = p1.context[:-1]
        h = p2.context
        if s != Sequent(g + h + (last,), p1.succedent):
            return bad("conclusion context must be G, H, implication")
        return True, ""

    if rule == "RightChoiceConj":
        succ = s.succedent
        if not isinstance(succ, ChoiceConj):
            return bad("succedent must be a choice conjunction")
        if len(kids) != len(succ.parts):
            return bad("needs one premise per component")
        for j, kid in enumerate(kids):
            if kid.sequent != Sequent(s.context, succ.parts[j]):
                return bad(f"premise {j + 1} must prove component {j + 1}")
        return True, ""

    if rule == "LeftChoiceConj":
        if len(kids) != 1:
            return bad("takes one premise")
        if not s.context or not isinstance(s.context[-1], ChoiceConj):
            return bad("last context formula must be a choice conjunction")
        parts = s.context[-1].parts
        if not 1 <= node.i <= len(parts):
            return bad("component index out of range")
        want = Sequent(s.context[:-1] + (parts[node.i - 1],), s.succedent)
        if kids[0].sequent != want:
            return bad("premise must use the chosen component")
        return True, ""

    if rule == "RightChoiceDisj":
        if len(kids) != 1:
            return bad("takes one premise")
        succ = s.succedent
        if not isinstance(succ, ChoiceDisj):
            return bad("succedent must be a choice disjunction")
        if not 1 <= node.i <= len(succ.parts):
            return bad("component index out of range")
        if kids[0].sequent != Sequent(s.context, succ.parts[node.i - 1]):
            return bad("premise must prove the chosen component")
        return True, ""

    if rule == "LeftChoiceDisj":
        if not s.context or not isinstance(s.context[-1], ChoiceDisj):
            return bad("last context formula must be a choice disjunction")
        parts = s.context[-1].parts
        if len(kids) != len(parts):
            return bad("needs one premise per component")
        for j, kid in enumerate(kids):
            want = Sequent(s.context[:-1] + (parts[j],), s.succedent)
            if kid.sequent != want:
                return bad(f"premise {j + 1} must use component {j + 1}")
        return True, ""

    if rule == "RightChoiceAll":
        if len(kids) != 1:
            return bad("takes one premise")
        succ = s.succedent
        if not isinstance(succ, ChoiceAll):
            return bad("succedent must be choice-quantified")
        if not node.y or node.y in _seq_vars(s):
            return bad(f"eigenvariable {node.y!r} occurs in the conclusion")
        want = Sequent(s.context,
                       fm.substitute(succ.body, [(succ.var, Var(node.y))]))
        if kids[0].sequent != want:
            return bad("premise must prove the body at the eigenvariable")
        return True, ""

    if rule == "LeftChoiceAll":
        if len(kids) != 1:
            return bad("takes one premise")
        if not s.context or not isinstance(s.context[-1], ChoiceAll):
            return bad("last context formula must be choice-quantified")
        q = s.context[-1]
        t = fm.term(node.t)
        if not fm.is_free_for(t, q.var, q.body):
            return bad(f"term {node.t} is not free for {q.var}")
        want = Sequent(s.context[:-1] + (fm.substitute(q.body, [(q.var, t)]),),
                       s.succedent)
        if kids[0].sequent != want:
            return bad("premise must use the instantiated body")
        return True, ""

    if rule == "RightChoiceExists":
        if len(kids) != 1:
            return bad("takes one premise")
        succ = s.succedent
        if not isinstance(succ, ChoiceExists):
            return bad("succedent must be choice-quantified")
        t = fm.term(node.t)
        if not fm.is_free_for(t, succ.var, succ.body):
            return bad(f"term {node.t} is not free for {succ.var}")
        want = Sequent(s.context, fm.substitute(succ.body, [(succ.var, t)]))
        if kids[0].sequent != want:
            return bad("premise must prove the instantiated body")
        return True, ""

    if rule == "LeftChoiceExists":
        if len(kids) != 1:
            return bad("takes one premise")
        if not s.context or not isinstance(s.context[-1], ChoiceExists):
            return bad("last context formula must be choice-quantified")
        q = s.context[-1]
        if not node.y or node.y in _seq_vars(s):
            return bad(f"eigenvariable {node.y!r} occurs in the conclusion")
        want = Sequent(s.context[:-1]
                       + (fm.substitute(q.body, [(q.var, Var(node.y))]),),
                       s.succedent)
        if kids[0].sequent != want:
            return bad("premise must use the body at the eigenvariable")
        return True, ""

    return bad("unreachable")


def check_proof(node: ProofNode) -> tuple[bool, str]:
    ok, why = check_rule(node)
    if not ok:
        return ok, why
    for kid in node.children:
        ok, why = check_proof(kid)
        if not ok:
            return ok, why
    return True, ""


# ---------------------------------------------------------------------------
# Compilation

def _atoms(prefix: str, n: int) -> list[Formula]:
    return [Atom(f"{prefix}{j + 1}") for j in range(n)]


def _fi(ctx: list[Formula], succ: Formula) -> Formula:
    """Flat implication with the empty-context degenerate case."""
    return Implies(par_conj(ctx), succ) if ctx else succ


def _lift_inst(m: int) -> Formula:
    """(R -> S) -> (X1 /\\ .. /\\ Xm /\\ R -> X1 /\\ .. /\\ Xm /\\ S)."""
    xs = _atoms("X", m)
    r, s = Atom("R0"), Atom("S0")
    return Implies(Implies(r, s), Implies(par_conj(xs + [r]), par_conj(xs + [s])))


def _lift_ctx(e: Expr, m: int) -> Expr:
    """From a strategy for R -> S, one for X-context /\\ R -> X-context /\\ S."""
    if m == 0:
        return e
    return mp([e], cl2_expr(_lift_inst(m)))


def compile_proof(node: ProofNode) -> Expr:
    ok, why = check_proof(node)
    if not ok:
        raise ValueError(f"invalid proof: {why}")
    return _compile(node)


def _compile(node: ProofNode) -> Expr:
    s = node.sequent
    rule = node.rule
    m = len(s.context) - (0 if rule in ("RightChoiceConj", "RightChoiceDisj",
                                        "RightChoiceAll", "RightChoiceExists",
                                        "RightImpl", "Identity", "Domination")
                          else 1)
    ihs = [_compile(kid) for kid in node.children]

    if rule == "Identity":
        return reg("l6a")

    if rule == "Domination":
        return reg(f"l6b[K={fm.render(s.succedent)}]")

    if rule == "Exchange":
        prem_ctx = node.children[0].sequent.context
        n = len(prem_ctx)
        xs = _atoms("X", n)
        z = Atom("Z0")
        swapped = list(xs)
        swapped[node.pos], swapped[node.pos + 1] = \
            swapped[node.pos + 1], swapped[node.pos]
        inst = Implies(_fi(xs, z), _fi(swapped, z))
        return mp([ihs[0]], cl2_expr(inst))

    if rule == "Weakening":
        n = len(node.children[0].sequent.context)
        xs = _atoms("X", n)
        z = Atom("Z0")
        inst = Implies(_fi(xs, z), _fi(xs + [Atom("P0")], z))
        return mp([ihs[0]], cl2_expr(inst))

    if rule == "Contraction":
        xs = _atoms("X", m)
        f0, z = Atom("F0"), Atom("Z0")
        inst = Implies(Implies(f0, ParConj((f0, f0))),
                       Implies(par_conj(xs + [f0]), par_conj(xs + [f0, f0])))
        half = mp([reg("l6c")], cl2_expr(inst))
        return trans(half, ihs[0])

    if rule == "RightImpl":
        g = len(s.context)
        if g == 0:
            return ihs[0]
        xs = _atoms("X", g)
        p0, z = Atom("P0"), Atom("Z0")
        inst = Implies(_fi(xs + [p0], z), _fi(xs, Implies(p0, z)))
        return mp([ihs[0]], cl2_expr(inst))

    if rule == "LeftImpl":
        p1, p2 = node.children
        gm = len(p1.sequent.context) - 1
        h = len(p2.sequent.context)
        # consequent-side double lift of the second premise
        if h == 0:
            e5 = bang(bang(ihs[1]))
        else:
            pairs = [Implies(Atom(f"A{j + 1}"), Atom(f"B{j + 1}"))
                     for j in range(h)]
            c1 = Implies(par_conj(pairs),
                         Implies(par_conj(_atoms("A", h)),
                                 par_conj(_atoms("B", h))))
            d2 = mp([reg("l5")] * h, cl2_expr(c1))
            d3 = trans(d2, reg("ccs") if h == 1 else reg(f"l4a[n={h}]"))
            d4 = trans(d3, reg("l5"))
            inner = bang(ihs[1])
            s1 = mp([inner], reg("l4"))
            s2 = mp([bang(s1)], reg("l4"))
            e5 = trans(d4, s2)
        # (P -> (Q -> T)) /\ (W-> Q) -> (P -> (W -> T))
        ws = _atoms("W", h)
        pa, qa, ta = Atom("P0"), Atom("Q0"), Atom("T0")
        inst_e = Implies(par_conj([Implies(pa, Implies(qa, ta)), _fi(ws, qa)]),
                         Implies(pa, _fi(ws, ta)))
        e6 = mp([reg("l4"), e5], cl2_expr(inst_e))
        # (P -> (W -> Q)) /\ (X /\ Q -> T) -> (X /\ W /\ P -> T)
        xs = _atoms("X", gm)
        qf, za = Atom("Q0"), Atom("Z0")
        inst_f = Implies(par_conj([Implies(pa, _fi(ws, qf)),
                                   _fi(xs + [qf], za)]),
                         _fi(xs + ws + [pa], za))
        return mp([e6, ihs[0]], cl2_expr(inst_f))

    if rule == "RightChoiceConj":
        n = len(node.children)
        xs = _atoms("X", len(s.context))
        ss = _atoms("S", n)
        inst = Implies(par_conj([_fi(xs, si) for si in ss]),
                       _fi(xs, ChoiceConj(tuple(ss))))
        return mp(ihs, cl2_expr(inst))

    if rule == "LeftChoiceConj":
        n = len(s.context[-1].parts)
        half = _lift_ctx(reg(f"l11a[i={node.i},n={n}]"), m)
        return trans(half, ihs[0])

    if rule == "RightChoiceDisj":
        n = len(s.succedent.parts)
        xs = _atoms("X", len(s.context))
        ss = _atoms("S", n)
        inst = Implies(_fi(xs, ss[node.i - 1]), _fi(xs, ChoiceDisj(tuple(ss))))
        return mp([ihs[0]], cl2_expr(inst))

    if rule == "LeftChoiceDisj":
        n = len(s.context[-1].parts)
        xs = _atoms("X", m)
        ss = _atoms("S", n)
        za = Atom("Z0")
        inst = Implies(par_conj([_fi(xs + [sj], za) for sj in ss]),
                       _fi(xs + [ChoiceDisj(tuple(ss))], za))
        e10 = mp(ihs, cl2_expr(inst))
        half = _lift_ctx(reg(f"l11c[n={n}]"), m)
        return trans(half, e10)

    if rule == "RightChoiceAll":
        g = len(s.context)
        lifted = allx(ihs[0], node.y)
        if g == 0:
            return mp([lifted], reg("oct99"))
        s1 = mp([lifted], reg("oct5a"))
        s2 = trans(reg("oct5c"), s1)
        return trans(s2, reg("oct99"))

    if rule == "LeftChoiceAll":
        half = _lift_ctx(reg(f"l11b[t={node.t}]"), m)
        return trans(half, ihs[0])

    if rule == "RightChoiceExists":
        return trans(ihs[0], reg(f"oct5b[t={node.t}]"))

    if rule == "LeftChoiceExists":
        s1 = allx(ihs[0], node.y)
        s2 = mp([s1], reg(f"oct5d[n={m}]"))
        if m == 0:
            s4 = s2
        else:
            pairs = [Implies(Atom(f"X{j + 1}"), Atom(f"A{j + 1}"))
                     for j in range(m)]
            ea = Atom("E0")
            c3 = Implies(par_conj(pairs),
                         Implies(par_conj(_atoms("X", m) + [ea]),
                                 par_conj(_atoms("A", m) + [ea])))
            s3 = mp([reg("oct5c")] * m, cl2_expr(c3))
            s4 = trans(s3, s2)
        s5 = trans(s4, reg("exists_drop"))
        s6 = _lift_ctx(reg("oct99"), m)
        s7 = trans(s6, s5)
        s8 = _lift_ctx(reg("l11d"), m)
        return trans(s8, s7)

    raise AssertionError(f"unhandled rule {rule}")


# ---------------------------------------------------------------------------
# JSON proof files

def proof_to_json(node: ProofNode) -> dict:
    out = {"sequent": fm.render_sequent(node.sequent), "rule": node.rule}
    if node.i:
        out["i"] = node.i
    if node.t:
        out["t"] = node.t
    if node.y:
        out["y"] = node.y
    if node.pos >= 0:
        out["pos"] = node.pos
    if node.children:
        out["premises"] = [proof_to_json(c) for c in node.children]
    return out


def proof_from_json(obj) -> ProofNode:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return ProofNode(
        sequent=fm.parse_sequent(obj["sequent"]),
        rule=obj["rule"],
        children=tuple(proof_from_json(c) for c in obj.get("premises", [])),
        i=obj.get("i", 0),
        t=str(obj.get("t", "")),
        y=obj.get("y", ""),
        pos=obj.get("pos", -1),
    )


# ---------------------------------------------------------------------------
# Curated derivations exercising every rule

def _seq(text: str) -> Sequent:
    return fm.parse_sequent(text)


def _identity(text: str) -> ProofNode:
    return ProofNode(_seq(text), "Identity")


def curated_theorem_corpus() -> list[tuple[str, ProofNode]]:
    """Named derivations covering all 15 rules at least once."""
    out: list[tuple[str, ProofNode]] = []

    out.append(("identity", _identity("P => P")))

    out.append(("domination-atom",
                ProofNode(_seq("$ => P"), "Domination")))

    out.append(("domination-mixed",
                ProofNode(_seq("$ => P & ?x.R(x)"), "Domination")))

    out.append(("impl-intro",
                ProofNode(_seq("=> !P -> P"), "RightImpl",
                          (_identity("P => P"),))))

    weak_pq = ProofNode(_seq("P, Q => P"), "Weakening", (_identity("P => P"),))
    out.append(("nested-impl",
                ProofNode(_seq("=> !P -> (!Q -> P)"), "RightImpl",
                          (ProofNode(_seq("P => !Q -> P"), "RightImpl",
                                     (weak_pq,)),))))

    out.append(("exchange",
                ProofNode(_seq("Q, P => P"), "Exchange", (weak_pq,), pos=0)))

    both = ProofNode(_seq("P, P => P & P"), "RightChoiceConj",
                     (ProofNode(_seq("P, P => P"), "Weakening",
                                (_identity("P => P"),)),
                      ProofNode(_seq("P, P => P"), "Weakening",
                                (_identity("P => P"),))))
    out.append(("contraction",
                ProofNode(_seq("P => P & P"), "Contraction", (both,))))

    out.append(("conj-left",
                ProofNode(_seq("P & Q => P"), "LeftChoiceConj",
                          (_identity("P => P"),), i=1)))

    out.append(("disj-right",
                ProofNode(_seq("P => P + Q"), "RightChoiceDisj",
                          (_identity("P => P"),), i=1)))

    out.append(("disj-swap",
                ProofNode(_seq("P + Q => Q + P"), "LeftChoiceDisj",
                          (ProofNode(_seq("P => Q + P"), "RightChoiceDisj",
                                     (_identity("P => P"),), i=2),
                           ProofNode(_seq("Q => Q + P"), "RightChoiceDisj",
                                     (_identity("Q => Q"),), i=1)))))

    out.append(("impl-elim",
                ProofNode(_seq("Q, !Q -> P => P"), "LeftImpl",
                          (_identity("P => P"), _identity("Q => Q")))))

    out.append(("conj-swap",
                ProofNode(_seq("=> !(P & Q) -> Q & P"), "RightImpl",
                          (ProofNode(_seq("P & Q => Q & P"), "RightChoiceConj",
                                     (ProofNode(_seq("P & Q => Q"),
                                                "LeftChoiceConj",
                                                (_identity("Q => Q"),), i=2),
                                      ProofNode(_seq("P & Q => P"),
                                                "LeftChoiceConj",
                                                (_identity("P => P"),), i=1))),))))

    out.append(("all-instantiate",
                ProofNode(_seq("@x.R(x) => R(3)"), "LeftChoiceAll",
                          (_identity("R(3) => R(3)"),), t="3")))

    out.append(("exists-witness",
                ProofNode(_seq("R(3) => ?x.R(x)"), "RightChoiceExists",
                          (_identity("R(3) => R(3)"),), t="3")))

    out.append(("all-rename",
                ProofNode(_seq("@x.R(x) => @z.R(z)"), "RightChoiceAll",
                          (ProofNode(_seq("@x.R(x) => R(y)"), "LeftChoiceAll",
                                     (_identity("R(y) => R(y)"),), t="y"),),
                          y="y")))

    out.append(("exists-rename",
                ProofNode(_seq("?x.R(x) => ?z.R(z)"), "LeftChoiceExists",
                          (ProofNode(_seq("R(y) => ?z.R(z)"),
                                     "RightChoiceExists",
                                     (_identity("R(y) => R(y)"),), t="y"),),
                          y="y")))

    return out
