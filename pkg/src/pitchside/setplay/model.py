"""Setplay AST: multi-step, multi-robot plans with alternative paths."""

from __future__ import annotations

from dataclasses import dataclass

CONDITION_OPS = (
    "true",
    "false",
    "and",
    "or",
    "not",
    "play-mode-is",
    "ball-in-region",
    "can-pass",
    "clear-shot",
    "elapsed",
    "opponents-within",
)

ACTION_KINDS = ("pass", "dribble", "shoot", "moveTo", "hold")
TRANSITION_KINDS = ("next", "finish", "abort")


@dataclass(frozen=True)
class Condition:
    op: str
    args: tuple = ()

    def children(self) -> tuple["Condition", ...]:
        if self.op in ("and", "or", "not"):
            return self.args
        return ()


TRUE = Condition("true")
FALSE = Condition("false")


@dataclass(frozen=True)
class ActionSpec:
    kind: str
    to_role: str = ""  # pass
    direction_deg: float = 0.0  # dribble
    x: float = 0.0  # moveTo
    y: float = 0.0


@dataclass(frozen=True)
class Transition:
    kind: str  # next | finish | abort
    target: int = -1  # step id, next only
    condition: Condition = TRUE


@dataclass(frozen=True)
class Step:
    id: int
    wait_min: float
    wait_max: float
    condition: Condition
    directives: tuple[tuple[str, ActionSpec], ...]
    transitions: tuple[Transition, ...]


@dataclass(frozen=True)
class SetplayAst:
    name: str
    id: int
    participants: tuple[str, ...]  # roles, lead first
    activation: Condition
    abort: Condition
    steps: tuple[Step, ...]

    def step(self, step_id: int) -> Step:
        for s in self.steps:
            if s.id == step_id:
                return s
        raise KeyError(step_id)

    @property
    def lead_role(self) -> str:
        return self.participants[0]


def condition_roles(cond: Condition) -> set[str]:
    """Roles referenced anywhere in a condition tree."""
    roles: set[str] = set()
    stack = [cond]
    while stack:
        c = stack.pop()
        if c.op == "can-pass":
            roles.update(c.args)
        elif c.op == "clear-shot":
            roles.add(c.args[0])
        stack.extend(c.children())
    return roles
