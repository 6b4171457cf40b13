"""Propositional fragment: decision procedure, proof checker, extraction.

Formulas here use two sorts of nullary atoms: general (uppercase Atom) and
elementary (lowercase Elem, with top/bot counting as elementary).  The
derivation rules:

  (a)  from the set of all replacements of positive surface choice
       conjunctions (negative surface choice disjunctions) by their
       components, conclude a stable formula;
  (b)  from one replacement of a negative surface choice conjunction
       (positive surface choice disjunction) by its i-th component,
       conclude the formula;
  (c)  from a formula with a fresh elementary atom at two surface spots,
       conclude the formula with a general atom (one positive and one
       negative occurrence) at those spots.

A formula is stable when its elementarization -- surface choice
conjunctions replaced by top, disjunctions by bot, positive surface
general atoms by bot, negative by top -- is a classical tautology.

Extraction turns a proof of a general-base formula into a machine: (b)
steps fire their recorded choice move, (a) steps wait for the environment
to resolve one of theirs, and (c) steps open a copy-cat channel between
the two matched occurrences.  The one strategy wins every substitutional
instance, because only the connective skeleton determines move prefixes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import formula as fm
from .epm import Machine, PlayContext
from .formula import (Atom, Bot, ChoiceConj, ChoiceDisj, Elem, Formula,
                      Implies, Neg, ParConj, ParDisj, Top)

Path = tuple[int, ...]

_CL2_NODES = (Atom, Elem, Top, Bot, Neg, ParConj, ParDisj, Implies,
              ChoiceConj, ChoiceDisj)


def _check_cl2(f: Formula) -> None:
    if not isinstance(f, _CL2_NODES):
        raise ValueError(f"not a propositional-fragment formula: {fm.render(f)}")
    if isinstance(f, Atom) and f.arity != 0:
        raise ValueError("atoms must be nullary here")
    for c in fm.children(f):
        _check_cl2(c)


# ---------------------------------------------------------------------------
# Occurrences, polarity, elementarization

def polarity_and_surface(f: Formula, path: Path) -> tuple[str, str]:
    """Polarity counts negations (implication antecedents count as one);
    surface means no choice connective strictly above."""
    neg = 0
    surface = True
    g = f
    for k in path:
        if isinstance(g, Neg):
            neg += 1
        elif isinstance(g, Implies) and k == 0:
            neg += 1
        elif isinstance(g, (ChoiceConj, ChoiceDisj)):
            surface = False
        g = fm.children(g)[k]
    return ("positive" if neg % 2 == 0 else "negative",
            "surface" if surface else "buried")


def occurrences(f: Formula):
    """All (path, subformula, positive?, surface?) in preorder."""
    out = []

    def walk(g: Formula, path: Path, pos: bool, surface: bool):
        out.append((path, g, pos, surface))
        for k, c in enumerate(fm.children(g)):
            p2 = pos
            if isinstance(g, Neg) or (isinstance(g, Implies) and k == 0):
                p2 = not pos
            s2 = surface and not isinstance(g, (ChoiceConj, ChoiceDisj))
            walk(c, path + (k,), p2, s2)

    walk(f, (), True, True)
    return out


def elementarization(f: Formula) -> Formula:
    _check_cl2(f)
    return _elem(f, True)


def _elem(f: Formula, pos: bool) -> Formula:
    if isinstance(f, ChoiceConj):
        return Top()
    if isinstance(f, ChoiceDisj):
        return Bot()
    if isinstance(f, Atom):
        return Bot() if pos else Top()
    if isinstance(f, (Elem, Top, Bot)):
        return f
    if isinstance(f, Neg):
        return Neg(_elem(f.body, not pos))
    if isinstance(f, Implies):
        return Implies(_elem(f.left, not pos), _elem(f.right, pos))
    if isinstance(f, ParConj):
        return ParConj(tuple(_elem(p, pos) for p in f.parts))
    if isinstance(f, ParDisj):
        return ParDisj(tuple(_elem(p, pos) for p in f.parts))
    raise ValueError(f"unexpected node {f!r}")


def _elem_names(f: Formula) -> frozenset[str]:
    if isinstance(f, Elem):
        return frozenset({f.name})
    out: frozenset[str] = frozenset()
    for c in fm.children(f):
        out |= _elem_names(c)
    return out


def _eval_classical(f: Formula, env: dict[str, bool]) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Elem):
        return env[f.name]
    if isinstance(f, Neg):
        return not _eval_classical(f.body, env)
    if isinstance(f, Implies):
        return (not _eval_classical(f.left, env)) or _eval_classical(f.right, env)
    if isinstance(f, ParConj):
        return all(_eval_classical(p, env) for p in f.parts)
    if isinstance(f, ParDisj):
        return any(_eval_classical(p, env) for p in f.parts)
    raise ValueError(f"non-elementary node {f!r} in classical evaluation")


def is_tautology(f: Formula) -> bool:
    names = sorted(_elem_names(f))
    for values in itertools.product((False, True), repeat=len(names)):
        if not _eval_classical(f, dict(zip(names, values))):
            return False
    return True


def is_stable(f: Formula) -> bool:
    return is_tautology(elementarization(f))


# ---------------------------------------------------------------------------
# Rule instances

def a_premises(f: Formula) -> list[tuple[Path, int, Formula]]:
    """(path, i, premise) for every environment-resolvable surface choice."""
    out = []
    for path, g, pos, surface in occurrences(f):
        if not surface:
            continue
        if (isinstance(g, ChoiceConj) and pos) or \
                (isinstance(g, ChoiceDisj) and not pos):
            for i, part in enumerate(g.parts, start=1):
                out.append((path, i, fm.replace_at(f, path, part)))
    return out


def b_options(f: Formula) -> list[tuple[Path, int, Formula]]:
    """(path, i, premise) for every machine-resolvable surface choice."""
    out = []
    for path, g, pos, surface in occurrences(f):
        if not surface:
            continue
        if (isinstance(g, ChoiceConj) and not pos) or \
                (isinstance(g, ChoiceDisj) and pos):
            for i, part in enumerate(g.parts, start=1):
                out.append((path, i, fm.replace_at(f, path, part)))
    return out


def _fresh_elem_name(f: Formula, letter: str) -> str:
    used = _elem_names(f)
    base = letter.lower()
    if base not in used:
        return base
    k = 2
    while f"{base}_{k}" in used:
        k += 1
    return f"{base}_{k}"


def c_options(f: Formula) -> list[tuple[Path, Path, str, Formula]]:
    """(positive path, negative path, fresh name, premise) for every
    opposite-polarity surface pair of one general atom."""
    pos_occ: dict[str, list[Path]] = {}
    neg_occ: dict[str, list[Path]] = {}
    for path, g, pos, surface in occurrences(f):
        if surface and isinstance(g, Atom):
            (pos_occ if pos else neg_occ).setdefault(g.letter, []).append(path)
    out = []
    for letter in sorted(set(pos_occ) & set(neg_occ)):
        name = _fresh_elem_name(f, letter)
        for ppos in pos_occ[letter]:
            for pneg in neg_occ[letter]:
                h = fm.replace_at(f, ppos, Elem(name))
                h = fm.replace_at(h, pneg, Elem(name))
                out.append((ppos, pneg, name, h))
    return out


# ---------------------------------------------------------------------------
# Proof objects

@dataclass(frozen=True)
class CL2Step:
    formula: Formula
    rule: str                                   # "a" | "b" | "c"
    premises: tuple[int, ...] = ()
    # rule (a): ((path, i, premise index), ...) descriptors
    branches: tuple[tuple[Path, int, int], ...] = ()
    path: Path = ()                             # rule (b)
    index: int = 0                              # rule (b)
    pos_path: Path = ()                         # rule (c)
    neg_path: Path = ()                         # rule (c)
    atom: str = ""                              # rule (c)


@dataclass(frozen=True)
class CL2Proof:
    steps: tuple[CL2Step, ...]                  # conclusion last

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1].formula

    def __deepcopy__(self, memo):
        return self                              # immutable; share across copies


class SearchBudgetExceeded(RuntimeError):
    pass


def prove(f: Formula, max_nodes: int = 500_000) -> CL2Proof | None:
    """Backward proof search; complete for this fragment, so None means
    refuted.  Raises SearchBudgetExceeded when the node budget runs out."""
    _check_cl2(f)
    memo: dict[str, object] = {}
    visits = [0]

    def search(g: Formula):
        key = fm.render(g)
        if key in memo:
            return memo[key]
        visits[0] += 1
        if visits[0] > max_nodes:
            raise SearchBudgetExceeded(f"gave up after {max_nodes} nodes")
        node = None
        if is_stable(g):
            branches = a_premises(g)
            kids = []
            ok = True
            for path, i, h in branches:
                sub = search(h)
                if sub is None:
                    ok = False
                    break
                kids.append((path, i, sub))
            if ok:
                node = ("a", g, kids)
        if node is None:
            for path, i, h in b_options(g):
                sub = search(h)
                if sub is not None:
                    node = ("b", g, path, i, sub)
                    break
        if node is None:
            for ppos, pneg, name, h in c_options(g):
                sub = search(h)
                if sub is not None:
                    node = ("c", g, ppos, pneg, name, sub)
                    break
        memo[key] = node
        return node

    root = search(f)
    if root is None:
        return None
    steps: list[CL2Step] = []
    seen: dict[int, int] = {}

    def emit(node) -> int:
        if id(node) in seen:
            return seen[id(node)]
        if node[0] == "a":
            _, g, kids = node
            branches = tuple((path, i, emit(sub)) for path, i, sub in kids)
            prem = tuple(sorted({ix for _, _, ix in branches}))
            step = CL2Step(g, "a", prem, branches)
        elif node[0] == "b":
            _, g, path, i, sub = node
            step = CL2Step(g, "b", (emit(sub),), path=path, index=i)
        else:
            _, g, ppos, pneg, name, sub = node
            step = CL2Step(g, "c", (emit(sub),), pos_path=ppos,
                           neg_path=pneg, atom=name)
        steps.append(step)
        seen[id(node)] = len(steps) - 1
        return len(steps) - 1

    emit(root)
    return CL2Proof(tuple(steps))


def check_proof(proof: CL2Proof) -> tuple[bool, str]:
    """Re-derive every step's justification; returns (ok, diagnostic)."""
    for idx, step in enumerate(proof.steps):
        if any(j >= idx for j in step.premises):
            return False, f"step {idx}: forward premise reference"
        f = step.formula
        try:
            _check_cl2(f)
        except ValueError as e:
            return False, f"step {idx}: {e}"
        if step.rule == "a":
            if not is_stable(f):
                return False, f"step {idx}: not stable"
            want = {fm.render(h) for _, _, h in a_premises(f)}
            have = {fm.render(proof.steps[j].formula) for j in step.premises}
            if want != have:
                return False, f"step {idx}: premise set mismatch"
        elif step.rule == "b":
            if len(step.premises) != 1:
                return False, f"step {idx}: needs one premise"
            g = fm.subformula_at(f, step.path)
            pol, surf = polarity_and_surface(f, step.path)
            ok = (isinstance(g, ChoiceConj) and pol == "negative") or \
                 (isinstance(g, ChoiceDisj) and pol == "positive")
            if not ok or surf != "surface":
                return False, f"step {idx}: bad choice occurrence"
            if not 1 <= step.index <= len(g.parts):
                return False, f"step {idx}: choice index out of range"
            h = fm.replace_at(f, step.path, g.parts[step.index - 1])
            if h != proof.steps[step.premises[0]].formula:
                return False, f"step {idx}: premise does not match replacement"
        elif step.rule == "c":
            if len(step.premises) != 1:
                return False, f"step {idx}: needs one premise"
            gp = fm.subformula_at(f, step.pos_path)
            gn = fm.subformula_at(f, step.neg_path)
            if not (isinstance(gp, Atom) and isinstance(gn, Atom)
                    and gp.letter == gn.letter):
                return False, f"step {idx}: occurrences are not one general atom"
            pp, sp = polarity_and_surface(f, step.pos_path)
            pn, sn = polarity_and_surface(f, step.neg_path)
            if (pp, pn) != ("positive", "negative"):
                return False, f"step {idx}: matched occurrences must have opposite polarities"
            if (sp, sn) != ("surface", "surface"):
                return False, f"step {idx}: occurrences must be surface"
            if step.atom in _elem_names(f):
                return False, f"step {idx}: atom {step.atom} already occurs"
            h = fm.replace_at(f, step.pos_path, Elem(step.atom))
            h = fm.replace_at(h, step.neg_path, Elem(step.atom))
            if h != proof.steps[step.premises[0]].formula:
                return False, f"step {idx}: premise does not match replacement"
        else:
            return False, f"step {idx}: unknown rule {step.rule!r}"
    return True, ""


# ---------------------------------------------------------------------------
# Text serialization (one step per line)

def _path_str(path: Path) -> str:
    return "e" if not path else ".".join(str(k) for k in path)


def _parse_path(s: str) -> Path:
    s = s.strip()
    if s == "e":
        return ()
    return tuple(int(x) for x in s.split("."))


def proof_to_text(proof: CL2Proof) -> str:
    lines = []
    for idx, step in enumerate(proof.steps, start=1):
        parts = [f"{idx}. {fm.render(step.formula)}", f"rule={step.rule}",
                 "premises=[" + ",".join(str(j + 1) for j in step.premises) + "]"]
        if step.rule == "b":
            parts.append(f"path={_path_str(step.path)}")
            parts.append(f"i={step.index}")
        if step.rule == "c":
            parts.append(f"path={_path_str(step.pos_path)},{_path_str(step.neg_path)}")
            parts.append(f"atom={step.atom}")
        lines.append(" ; ".join(parts))
    return "\n".join(lines) + "\n"


def proof_from_text(text: str) -> CL2Proof:
    steps: list[CL2Step] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        head, *fields = [p.strip() for p in line.split(";")]
        num, _, formula_text = head.partition(".")
        f = fm.parse_formula(formula_text)
        kv = {}
        for fld in fields:
            k, _, v = fld.partition("=")
            kv[k.strip()] = v.strip()
        rule = kv.get("rule", "")
        prem_text = kv.get("premises", "[]").strip("[]")
        premises = tuple(int(x) - 1 for x in prem_text.split(",") if x)
        if rule == "b":
            step = CL2Step(f, "b", premises, path=_parse_path(kv["path"]),
                           index=int(kv["i"]))
        elif rule == "c":
            ppos, _, pneg = kv["path"].partition(",")
            step = CL2Step(f, "c", premises, pos_path=_parse_path(ppos),
                           neg_path=_parse_path(pneg), atom=kv["atom"])
        elif rule == "a":
            branches = []
            for path, i, h in a_premises(f):
                target = fm.render(h)
                hit = next((j for j in premises
                            if fm.render(steps[j].formula) == target), None)
                if hit is not None:
                    branches.append((path, i, hit))
            step = CL2Step(f, "a", premises, tuple(branches))
        else:
            raise ValueError(f"bad proof line {line!r}")
        steps.append(step)
    return CL2Proof(tuple(steps))


# ---------------------------------------------------------------------------
# Strategy extraction

def _move_prefix(f: Formula, path: Path) -> str:
    out = []
    g = f
    for k in path:
        if isinstance(g, (ParConj, ParDisj, Implies)):
            out.append(f"{k + 1}.")
        g = fm.children(g)[k]
    return "".join(out)


class ProofMachine(Machine):
    """Plays the conclusion of a checked proof of a general-base formula.

    Walks the proof from the conclusion toward the axioms: choice steps
    fire immediately, channel steps open mirrors (catching up on any
    buffered adversary moves in the matched components), and stable steps
    wait for the environment to resolve one of their recorded choices.
    """

    def __init__(self, proof: CL2Proof):
        ok, why = check_proof(proof)
        if not ok:
            raise ValueError(f"invalid proof: {why}")
        if not fm.is_general_base(proof.conclusion):
            raise ValueError("conclusion is not general-base")
        self.proof = proof
        self.step = len(proof.steps) - 1
        self.channels: list[tuple[str, str]] = []
        self.log: list[str] = []
        self.waits: list[tuple[str, int]] = []   # (full choice move, premise)
        self._bootstrapped = False

    def start(self, ctx: PlayContext) -> list[str]:
        self._bootstrapped = True
        return self._advance()

    def _advance(self) -> list[str]:
        out: list[str] = []
        while True:
            step = self.proof.steps[self.step]
            if step.rule == "b":
                prefix = _move_prefix(step.formula, step.path)
                out.append(prefix + str(step.index))
                self.step = step.premises[0]
            elif step.rule == "c":
                pa = _move_prefix(step.formula, step.pos_path)
                pb = _move_prefix(step.formula, step.neg_path)
                self.channels.append((pa, pb))
                out.extend(self._catch_up(pa, pb))
                self.step = step.premises[0]
            else:
                self.waits = [(_move_prefix(step.formula, path) + str(i), prem)
                              for path, i, prem in step.branches]
                return out

    def _catch_up(self, pa: str, pb: str) -> list[str]:
        out = []
        keep = []
        for m in self.log:
            if m.startswith(pa):
                out.append(pb + m[len(pa):])
            elif m.startswith(pb):
                out.append(pa + m[len(pb):])
            else:
                keep.append(m)
        self.log = keep
        return out

    def on_env(self, move: str) -> list[str]:
        for pa, pb in self.channels:
            if move.startswith(pa):
                return [pb + move[len(pa):]]
            if move.startswith(pb):
                return [pa + move[len(pb):]]
        for full, prem in self.waits:
            if move == full:
                self.step = prem
                self.waits = []
                return self._advance()
        self.log.append(move)
        return []


_PROOF_CACHE: dict[str, CL2Proof] = {}


def solution_machine(f: Formula) -> ProofMachine:
    """Prove f (cached) and extract a fresh machine playing it."""
    key = fm.render(f)
    if key not in _PROOF_CACHE:
        proof = prove(f)
        if proof is None:
            raise ValueError(f"not provable: {key}")
        _PROOF_CACHE[key] = proof
    return ProofMachine(_PROOF_CACHE[key])


def extract_strategy(proof: CL2Proof):
    from .epm import Strategy
    return Strategy(ProofMachine(proof))
