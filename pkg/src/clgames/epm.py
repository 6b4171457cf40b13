"""The interaction model: permission-granting strategies vs environments.

A strategy is a deterministic transducer over the observed run.  It sees
only the run, the valuation and the letter signature -- never the
interpretation -- which is exactly what makes a winning strategy uniform.
The environment may make (at most) one move per permission grant; the
simulator checks environment moves for legality itself, so an illegal
environment move ends the play with an immediate machine win.
"""

from __future__ import annotations

import copy
import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

from .games import (B, GameRef, Labmove, MoveStatus, Player, Run, Signature,
                    T, Valuation, candidate_moves, classify_move, winner)


@dataclass(frozen=True)
class PlayContext:
    """Public play data: the valuation oracle and the letter signature."""
    valuation: Valuation
    signature: Signature = ()


class ActionKind(str, enum.Enum):
    MOVE = "move"
    GRANT = "grant"
    IDLE = "idle"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    payload: str = ""


GRANT = Action(ActionKind.GRANT)
IDLE = Action(ActionKind.IDLE)


def move_action(payload: str) -> Action:
    return Action(ActionKind.MOVE, payload)


class Machine:
    """One-pass reactive core of a strategy.

    start() may emit proactive moves; on_env() reacts to one environment
    move with a (possibly empty) burst of machine moves.  `settled` means
    the machine has no pending work: if the environment stays silent from a
    settled state, stopping the play is safe.
    """

    settled: bool = True

    def start(self, ctx: PlayContext) -> list[str]:
        return []

    def on_env(self, move: str) -> list[str]:
        return []


class Strategy:
    """Adapter running a Machine against the growing observed run."""

    def __init__(self, machine: Machine):
        self.machine = machine
        self.cursor = 0
        self.queue: deque[str] = deque()
        self.started = False
        self.ctx: Optional[PlayContext] = None

    def init(self, ctx: PlayContext) -> None:
        self.ctx = ctx

    def next(self, run: Run) -> Action:
        if not self.started:
            self.started = True
            self.queue.extend(self.machine.start(self.ctx))
        while not self.queue and self.cursor < len(run):
            lm = run[self.cursor]
            self.cursor += 1
            if lm.player is T:
                continue                      # own move echoed back
            self.queue.extend(self.machine.on_env(lm.move))
        if self.queue:
            return move_action(self.queue.popleft())
        return GRANT

    @property
    def settled(self) -> bool:
        return self.started and not self.queue and self.machine.settled

    def snapshot(self):
        return copy.deepcopy(
            (self.machine, self.cursor, tuple(self.queue), self.started, self.ctx))

    def restore(self, snap) -> None:
        machine, cursor, queue, started, ctx = copy.deepcopy(snap)
        self.machine = machine
        self.cursor = cursor
        self.queue = deque(queue)
        self.started = started
        self.ctx = ctx

    def clone(self) -> "Strategy":
        return copy.deepcopy(self)


# ---------------------------------------------------------------------------
# Environments

class Environment:
    def on_permission(self, game: GameRef, run: Run) -> Optional[str]:
        return None


class SilentEnv(Environment):
    pass


class ScriptEnv(Environment):
    """Replays directives: ("move", m) emits m, "pass" declines one grant,
    "stop" declines forever."""

    def __init__(self, directives):
        self.directives = list(directives)
        self.k = 0

    def on_permission(self, game, run):
        if self.k >= len(self.directives):
            return None
        d = self.directives[self.k]
        if d == "stop":
            return None
        self.k += 1
        if d == "pass":
            return None
        if isinstance(d, tuple) and d[0] == "move":
            return d[1]
        raise ValueError(f"bad directive {d!r}")

    @staticmethod
    def from_text(text: str) -> "ScriptEnv":
        directives = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line == "pass" or line == "stop":
                directives.append(line)
            elif line.startswith("move "):
                directives.append(("move", line[5:].strip()))
            else:
                raise ValueError(f"bad script line {line!r}")
        return ScriptEnv(directives)


class RandomEnv(Environment):
    """Seeded adversary: on each grant, maybe plays a random legal move."""

    def __init__(self, seed: int, max_moves: int = 6, move_prob: float = 0.8,
                 ccap: int = 3, structural_only: bool = False):
        import random
        self.rng = random.Random(seed)
        self.max_moves = max_moves
        self.move_prob = move_prob
        self.ccap = ccap
        self.structural_only = structural_only
        self.made = 0

    def on_permission(self, game, run):
        if self.made >= self.max_moves or self.rng.random() > self.move_prob:
            return None
        legal = candidate_moves(game, run, B, self.ccap, self.structural_only)
        if not legal:
            return None
        self.made += 1
        return self.rng.choice(legal)


# ---------------------------------------------------------------------------
# Simulation

class HaltReason(str, enum.Enum):
    QUIESCENT = "quiescent"
    BUDGET = "budget"
    ENV_ILLEGAL = "env_illegal"
    MACHINE_ILLEGAL = "machine_illegal"


@dataclass
class Transcript:
    run: Run
    verdict: Player
    steps: int
    grants: int
    halted_reason: HaltReason
    events: list = field(default_factory=list)
    diagnostic: str = ""

    def to_text(self, game_label: str = "", valuation: Optional[Valuation] = None) -> str:
        lines = []
        if game_label:
            lines.append(f"#game {game_label}")
        if valuation is not None:
            pairs = " ".join(f"{k}={v}" for k, v in sorted(valuation.assign.items()))
            lines.append(f"#valuation default={valuation.default} {pairs}".rstrip())
        lines.extend(f"{lm.player.value} {lm.move}" for lm in self.run)
        lines.append(f"#verdict {self.verdict.value} reason={self.halted_reason.value}"
                     f" steps={self.steps} grants={self.grants}")
        return "\n".join(lines) + "\n"


def simulate(strategy: Strategy, env: Environment, game: GameRef,
             budget: int = 4000,
             on_step: Optional[Callable[[Run], None]] = None,
             on_grant: Optional[Callable[[Run], None]] = None) -> Transcript:
    """Alternating play loop; see module docstring for the contract.

    on_step fires after every appended labmove; on_grant fires at each
    permission point, i.e. when the machine has flushed its responses.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    ctx = PlayContext(game.valuation, game.interp.signature)
    strategy.init(ctx)
    run: list[Labmove] = []
    events: list = []
    steps = 0
    grants = 0
    reason = HaltReason.BUDGET
    diagnostic = ""
    while steps < budget:
        action = strategy.next(tuple(run))
        steps += 1
        if action.kind is ActionKind.MOVE:
            lm = Labmove(T, action.payload)
            status = classify_move(game, tuple(run), lm)
            run.append(lm)
            events.append(("move", "T", action.payload))
            if on_step:
                on_step(tuple(run))
            if status is MoveStatus.ILLEGAL:
                reason = HaltReason.MACHINE_ILLEGAL
                diagnostic = f"machine made illegal move {action.payload!r}"
                break
        elif action.kind is ActionKind.GRANT:
            grants += 1
            events.append(("grant",))
            if on_grant:
                on_grant(tuple(run))
            mv = env.on_permission(game, tuple(run))
            if mv is None:
                if strategy.settled:
                    reason = HaltReason.QUIESCENT
                    break
                continue
            lm = Labmove(B, mv)
            if classify_move(game, tuple(run), lm) is MoveStatus.ILLEGAL:
                reason = HaltReason.ENV_ILLEGAL
                diagnostic = f"environment attempted illegal move {mv!r}"
                break
            run.append(lm)
            events.append(("move", "B", mv))
            if on_step:
                on_step(tuple(run))
        else:
            events.append(("idle",))
    if reason is HaltReason.ENV_ILLEGAL:
        verdict = T
    else:
        verdict = winner(game, tuple(run))
    return Transcript(tuple(run), verdict, steps, grants, reason, events,
                      diagnostic)


def check_fairness(t: Transcript, window: int) -> bool:
    """Finite fairness surrogate: every window of steps contains a grant."""
    since = 0
    for ev in t.events:
        if ev[0] == "grant":
            since = 0
        else:
            since += 1
            if since >= window:
                return False
    return True


@dataclass
class SearchResult:
    won_all: bool
    leaves: int
    counterexample: Optional[Transcript] = None


class BudgetExceeded(RuntimeError):
    pass


def wins_against_all(strategy: Strategy, game: GameRef, depth: int,
                     ccap: int = 3, budget: int = 2000,
                     max_leaves: int = 100_000,
                     on_step: Optional[Callable[[Run], None]] = None) -> SearchResult:
    """Exhaustively explore environment behaviors with <= depth env moves.

    At each grant the environment either stays silent (ending the play,
    since the strategies settle) or makes any legal move from the bounded
    candidate alphabet.  Strategy snapshots drive the backtracking.
    """
    ctx = PlayContext(game.valuation, game.interp.signature)
    leaves = 0

    def adjudicate(run: Run) -> Optional[Transcript]:
        nonlocal leaves
        leaves += 1
        if leaves > max_leaves:
            raise BudgetExceeded(f"exhaustive search exceeded {max_leaves} leaves")
        v = winner(game, run)
        if v is not T:
            return Transcript(run, v, 0, 0, HaltReason.QUIESCENT)
        return None

    def advance(strat: Strategy, run: list[Labmove], steps: int):
        """Run machine actions until it grants; returns updated steps or a
        counterexample transcript."""
        while steps < budget:
            action = strat.next(tuple(run))
            steps += 1
            if action.kind is ActionKind.MOVE:
                lm = Labmove(T, action.payload)
                status = classify_move(game, tuple(run), lm)
                run.append(lm)
                if on_step:
                    on_step(tuple(run))
                if status is MoveStatus.ILLEGAL:
                    return None, Transcript(
                        tuple(run), B, steps, 0, HaltReason.MACHINE_ILLEGAL,
                        diagnostic=f"illegal machine move {action.payload!r}")
            else:
                return steps, None
        return None, Transcript(tuple(run), winner(game, tuple(run)), steps, 0,
                                HaltReason.BUDGET,
                                diagnostic="step budget exhausted mid-branch")

    def explore(strat: Strategy, run: list[Labmove], steps: int,
                decisions: int) -> Optional[Transcript]:
        steps2, bad = advance(strat, run, steps)
        if bad is not None:
            return bad if bad.verdict is not T else None
        # silent option: play stops here
        cex = adjudicate(tuple(run))
        if cex is not None:
            return cex
        if decisions >= depth:
            return None
        for mv in candidate_moves(game, tuple(run), B, ccap):
            branch_strat = strat.clone()
            branch_run = list(run)
            branch_run.append(Labmove(B, mv))
            if on_step:
                on_step(tuple(branch_run))
            cex = explore(branch_strat, branch_run, steps2, decisions + 1)
            if cex is not None:
                return cex
        return None

    root = strategy.clone()
    root.init(ctx)
    cex = explore(root, [], 0, 0)
    return SearchResult(cex is None, leaves, cex)
