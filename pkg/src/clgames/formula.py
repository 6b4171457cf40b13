r"""Formula AST, parser, printer and syntactic utilities.

The surface grammar (ASCII):

    atoms        P, P(t1,...,tn)        uppercase letter, terms are
                                        lowercase variables or positive
                                        integer constants
    elementary   p, q, r                lowercase nullary atoms (only used
                                        by the propositional fragment)
    constants    top, bot, $
    negation     ~F
    recurrence   !F
    quantifiers  @x.F   ?x.F
    parallel     F /\ G /\ ...          F \/ G \/ ...
    choice       F & G & ...            F + G + ...
    implication  F -> G                 right associative

Precedence, tightest first: prefix operators (~, !, @x., ?x.), then
/\ and &, then \/ and +, then ->.  Chains of one operator collect into a
single variadic node; mixing /\ with & (or \/ with +) at the same level
requires parentheses.  Sequents are written `F1, F2 => K` or `=> K`.
"""

from __future__ import annotations

from dataclasses import dataclass


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    value: int

    def __repr__(self):
        return str(self.value)


Term = Var | Const


def term(x) -> Term:
    """Coerce a string/int into a Term."""
    if isinstance(x, (Var, Const)):
        return x
    if isinstance(x, int):
        return Const(x)
    if isinstance(x, str) and x.isdigit():
        return Const(int(x))
    if isinstance(x, str) and x and x[0].islower():
        return Var(x)
    raise ValueError(f"not a term: {x!r}")


# ---------------------------------------------------------------------------
# Formulas

@dataclass(frozen=True)
class Atom:
    letter: str                 # uppercase identifier
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class Elem:
    """Nullary elementary atom (lowercase); propositional fragment only."""
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Dollar:
    pass


@dataclass(frozen=True)
class Neg:
    body: "Formula"


@dataclass(frozen=True)
class ParConj:
    parts: tuple["Formula", ...]

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("parallel conjunction needs >= 2 parts")


@dataclass(frozen=True)
class ParDisj:
    parts: tuple["Formula", ...]

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("parallel disjunction needs >= 2 parts")


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ChoiceConj:
    parts: tuple["Formula", ...]

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("choice conjunction needs >= 2 parts")


@dataclass(frozen=True)
class ChoiceDisj:
    parts: tuple["Formula", ...]

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("choice disjunction needs >= 2 parts")


@dataclass(frozen=True)
class ChoiceAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ChoiceExists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Bang:
    body: "Formula"


Formula = (Atom | Elem | Top | Bot | Dollar | Neg | ParConj | ParDisj
           | Implies | ChoiceConj | ChoiceDisj | ChoiceAll | ChoiceExists
           | Bang)


def int_impl(left: Formula, right: Formula) -> Formula:
    """Resource implication: reduction of `right` to reusable `left`."""
    return Implies(Bang(left), right)


def par_conj(parts) -> Formula:
    """Flat parallel conjunction; collapses 0/1-element lists."""
    parts = tuple(parts)
    if not parts:
        raise ValueError("empty conjunction has no formula")
    if len(parts) == 1:
        return parts[0]
    return ParConj(parts)


# ---------------------------------------------------------------------------
# Syntactic utilities

def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Neg):
        return (f.body,)
    if isinstance(f, Bang):
        return (f.body,)
    if isinstance(f, (ChoiceAll, ChoiceExists)):
        return (f.body,)
    if isinstance(f, Implies):
        return (f.left, f.right)
    if isinstance(f, (ParConj, ParDisj, ChoiceConj, ChoiceDisj)):
        return f.parts
    return ()


def replace_child(f: Formula, k: int, sub: Formula) -> Formula:
    if isinstance(f, Neg):
        return Neg(sub)
    if isinstance(f, Bang):
        return Bang(sub)
    if isinstance(f, ChoiceAll):
        return ChoiceAll(f.var, sub)
    if isinstance(f, ChoiceExists):
        return ChoiceExists(f.var, sub)
    if isinstance(f, Implies):
        return Implies(sub, f.right) if k == 0 else Implies(f.left, sub)
    if isinstance(f, ParConj):
        return ParConj(f.parts[:k] + (sub,) + f.parts[k + 1:])
    if isinstance(f, ParDisj):
        return ParDisj(f.parts[:k] + (sub,) + f.parts[k + 1:])
    if isinstance(f, ChoiceConj):
        return ChoiceConj(f.parts[:k] + (sub,) + f.parts[k + 1:])
    if isinstance(f, ChoiceDisj):
        return ChoiceDisj(f.parts[:k] + (sub,) + f.parts[k + 1:])
    raise ValueError(f"{type(f).__name__} has no children")


def subformula_at(f: Formula, path: tuple[int, ...]) -> Formula:
    for k in path:
        kids = children(f)
        if k >= len(kids):
            raise ValueError(f"bad path {path} in {render(f)}")
        f = kids[k]
    return f


def replace_at(f: Formula, path: tuple[int, ...], sub: Formula) -> Formula:
    if not path:
        return sub
    k = path[0]
    return replace_child(f, k, replace_at(children(f)[k], path[1:], sub))


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset(t.name for t in f.args if isinstance(t, Var))
    if isinstance(f, (ChoiceAll, ChoiceExists)):
        return free_vars(f.body) - {f.var}
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= free_vars(c)
    return out


def all_vars(f: Formula) -> frozenset[str]:
    """Variables with any occurrence, free or bound (quantified vars count)."""
    if isinstance(f, Atom):
        return frozenset(t.name for t in f.args if isinstance(t, Var))
    if isinstance(f, (ChoiceAll, ChoiceExists)):
        return all_vars(f.body) | {f.var}
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= all_vars(c)
    return out


def letters_of(f: Formula) -> frozenset[tuple[str, int]]:
    if isinstance(f, Atom):
        return frozenset({(f.letter, f.arity)})
    out: frozenset[tuple[str, int]] = frozenset()
    for c in children(f):
        out |= letters_of(c)
    return out


def substitute(f: Formula, bindings) -> Formula:
    """Simultaneous substitution of free variable occurrences by terms.

    `bindings` is an iterable of (variable-name, term); variables must be
    pairwise distinct.  Bound occurrences are untouched; capture avoidance
    is the caller's concern (see is_free_for).
    """
    m = {}
    for x, t in bindings:
        if x in m:
            raise ValueError(f"variable {x} bound twice")
        m[x] = term(t)
    return _subst(f, m)


def _subst(f: Formula, m: dict) -> Formula:
    if not m:
        return f
    if isinstance(f, Atom):
        return Atom(f.letter, tuple(
            m.get(t.name, t) if isinstance(t, Var) else t for t in f.args))
    if isinstance(f, (ChoiceAll, ChoiceExists)):
        inner = {x: t for x, t in m.items() if x != f.var}
        return type(f)(f.var, _subst(f.body, inner))
    kids = children(f)
    if not kids:
        return f
    out = f
    for k, c in enumerate(kids):
        out = replace_child(out, k, _subst(c, m))
    return out


def is_free_for(t, x: str, f: Formula) -> bool:
    """True iff no free occurrence of x in f lies under a quantifier binding t."""
    t = term(t)
    if isinstance(t, Const):
        return True
    return _free_for(t.name, x, f)


def _free_for(tname: str, x: str, f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, (ChoiceAll, ChoiceExists)):
        if f.var == x:
            return True                      # x bound below; no free occurrence
        if f.var == tname and x in free_vars(f.body):
            return False
        return _free_for(tname, x, f.body)
    return all(_free_for(tname, x, c) for c in children(f))


def is_int_formula(f: Formula) -> bool:
    """Membership in the resource-logic sublanguage.

    Allowed: nonlogical atoms, $, choice connectives/quantifiers, and
    implications whose antecedent is a banged subformula (the encoded
    resource implication).
    """
    if isinstance(f, Atom):
        return True
    if isinstance(f, Dollar):
        return True
    if isinstance(f, (ChoiceConj, ChoiceDisj)):
        return all(is_int_formula(p) for p in f.parts)
    if isinstance(f, (ChoiceAll, ChoiceExists)):
        return is_int_formula(f.body)
    if isinstance(f, Implies) and isinstance(f.left, Bang):
        return is_int_formula(f.left.body) and is_int_formula(f.right)
    return False


def is_general_base(f: Formula) -> bool:
    """No elementary atoms (top/bot included), no quantifiers, no !, no $."""
    if isinstance(f, (Elem, Top, Bot, Dollar, ChoiceAll, ChoiceExists, Bang)):
        return False
    if isinstance(f, Atom):
        return f.arity == 0
    return all(is_general_base(c) for c in children(f))


# ---------------------------------------------------------------------------
# Sequents

@dataclass(frozen=True)
class Sequent:
    context: tuple[Formula, ...]
    succedent: Formula

    def __post_init__(self):
        for g in self.context + (self.succedent,):
            if not is_int_formula(g):
                raise ValueError(f"not in the sublanguage: {render(g)}")


def sequent_to_formula(s: Sequent) -> Formula:
    """Read a sequent as a formula: bang every context member, conjoin, imply."""
    if not s.context:
        return s.succedent
    return Implies(par_conj([Bang(e) for e in s.context]), s.succedent)


# ---------------------------------------------------------------------------
# Printing

_PREC_IMP = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_PREFIX = 4


def render(f: Formula) -> str:
    return _render(f, 0)


def _render(f: Formula, ctx: int) -> str:
    if isinstance(f, Atom):
        if not f.args:
            return f.letter
        return f.letter + "(" + ",".join(repr(t) for t in f.args) + ")"
    if isinstance(f, Elem):
        return f.name
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Dollar):
        return "$"
    if isinstance(f, Neg):
        return "~" + _render(f.body, _PREC_PREFIX)
    if isinstance(f, Bang):
        return "!" + _render(f.body, _PREC_PREFIX)
    if isinstance(f, ChoiceAll):
        return f"@{f.var}." + _render(f.body, _PREC_PREFIX)
    if isinstance(f, ChoiceExists):
        return f"?{f.var}." + _render(f.body, _PREC_PREFIX)
    if isinstance(f, Implies):
        s = _render(f.left, _PREC_IMP + 1) + " -> " + _render(f.right, _PREC_IMP)
        return "(" + s + ")" if ctx > _PREC_IMP else s
    ops = {ParConj: (" /\\ ", _PREC_AND), ChoiceConj: (" & ", _PREC_AND),
           ParDisj: (" \\/ ", _PREC_OR), ChoiceDisj: (" + ", _PREC_OR)}
    op, prec = ops[type(f)]
    s = op.join(_render(p, prec + 1) for p in f.parts)
    return "(" + s + ")" if ctx > prec else s


def render_sequent(s: Sequent) -> str:
    ctx = ", ".join(render(g) for g in s.context)
    return (ctx + " => " if ctx else "=> ") + render(s.succedent)


# ---------------------------------------------------------------------------
# Parsing

class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


_SYMBOLS = ["->", "/\\", "\\/", "=>", "(", ")", ",", ".", "~", "!", "@", "?",
            "&", "+", "$"]


def _tokenize(text: str):
    toks = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append((sym, sym, i))
                i += len(sym)
                break
        else:
            if c.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                toks.append(("INT", text[i:j], i))
                i = j
            elif c.isalpha():
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                toks.append(("IDENT", text[i:j], i))
                i = j
            else:
                raise ParseError(f"unexpected character {c!r}", i)
    toks.append(("EOF", "", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def next(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, kind):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind!r}, got {t[1]!r}", t[2])
        return t

    def fail(self, msg):
        raise ParseError(msg, self.peek()[2])

    # -- grammar -----------------------------------------------------------

    def formula(self) -> Formula:
        return self.implication()

    def implication(self) -> Formula:
        left = self.level(_PREC_OR)
        if self.peek()[0] == "->":
            self.next()
            return Implies(left, self.implication())
        return left

    def level(self, prec: int) -> Formula:
        pairs = {_PREC_OR: (("\\/", ParDisj), ("+", ChoiceDisj)),
                 _PREC_AND: (("/\\", ParConj), ("&", ChoiceConj))}
        sub = (lambda: self.level(_PREC_AND)) if prec == _PREC_OR else self.prefix
        first = sub()
        ops = pairs[prec]
        tok = self.peek()[0]
        for sym, cls in ops:
            if tok == sym:
                parts = [first]
                while self.peek()[0] == sym:
                    self.next()
                    parts.append(sub())
                other = ops[1 - [s for s, _ in ops].index(sym)][0]
                if self.peek()[0] == other:
                    self.fail(f"mixing {sym!r} and {other!r} needs parentheses")
                return cls(tuple(parts))
        return first

    def prefix(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "~":
            self.next()
            return Neg(self.prefix())
        if kind == "!":
            self.next()
            return Bang(self.prefix())
        if kind in ("@", "?"):
            self.next()
            v = self.expect("IDENT")[1]
            if not v[0].islower():
                raise ParseError("quantified variable must be lowercase", pos)
            self.expect(".")
            body = self.prefix()
            return ChoiceAll(v, body) if kind == "@" else ChoiceExists(v, body)
        return self.atom()

    def atom(self) -> Formula:
        kind, val, pos = self.next()
        if kind == "(":
            f = self.formula()
            self.expect(")")
            return f
        if kind == "$":
            return Dollar()
        if kind == "IDENT":
            if val == "top":
                return Top()
            if val == "bot":
                return Bot()
            if val[0].isupper():
                if self.peek()[0] == "(":
                    self.next()
                    args = [self.term()]
                    while self.peek()[0] == ",":
                        self.next()
                        args.append(self.term())
                    self.expect(")")
                    return Atom(val, tuple(args))
                return Atom(val)
            return Elem(val)
        raise ParseError(f"unexpected token {val!r}", pos)

    def term(self) -> Term:
        kind, val, pos = self.next()
        if kind == "INT":
            v = int(val)
            if v < 1:
                raise ParseError("constants start at 1", pos)
            return Const(v)
        if kind == "IDENT" and val[0].islower():
            return Var(val)
        raise ParseError(f"expected a term, got {val!r}", pos)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek()[0] != "EOF":
        p.fail(f"trailing input {p.peek()[1]!r}")
    _check_arities(f, {})
    return f


def _check_arities(f: Formula, seen: dict):
    if isinstance(f, Atom):
        old = seen.setdefault(f.letter, f.arity)
        if old != f.arity:
            raise ParseError(
                f"letter {f.letter} used with arities {old} and {f.arity}", 0)
    for c in children(f):
        _check_arities(c, seen)


def _identity_deepcopy(self, memo):
    return self


# Formulas and terms are immutable; share them across deepcopies (strategy
# snapshots copy their state graphs, which often embed formulas).
for _cls in (Var, Const, Atom, Elem, Top, Bot, Dollar, Neg, ParConj, ParDisj,
             Implies, ChoiceConj, ChoiceDisj, ChoiceAll, ChoiceExists, Bang,
             Sequent):
    _cls.__deepcopy__ = _identity_deepcopy


def parse_sequent(text: str) -> Sequent:
    if "=>" not in text:
        raise ParseError("a sequent needs '=>'", 0)
    left, right = text.split("=>", 1)
    succ = parse_formula(right)
    ctx = []
    if left.strip():
        depth = 0
        start = 0
        chunks = []
        for i, c in enumerate(left):
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
            elif c == "," and depth == 0:
                chunks.append(left[start:i])
                start = i + 1
        chunks.append(left[start:])
        ctx = [parse_formula(ch) for ch in chunks]
    return Sequent(tuple(ctx), succ)
