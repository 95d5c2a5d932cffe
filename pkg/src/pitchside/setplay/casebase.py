"""Case memory and similarity-weighted setplay selection.

Selection scores each candidate by its Laplace-smoothed, similarity-weighted
historical success: score = (sum K*success + alpha) / (sum K + alpha + beta)
over that setplay's cases, with a Gaussian kernel on ball-position distance
(bandwidth 5 m) damped x0.1 when the play mode differs.  Deterministic:
ties go to the lowest setplay id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..geometry import Point
from .conditions import WorldView, evaluate
from .executor import bind_roles
from .model import SetplayAst

KERNEL_BANDWIDTH = 5.0  # meters
PLAYMODE_MISMATCH_FACTOR = 0.1
ALPHA = 1.0
BETA = 1.0


@dataclass(frozen=True)
class ContextFeatures:
    ball_pos: Point
    play_mode: str
    nearest_opponent: float  # distance, stored for analysis


@dataclass(frozen=True)
class Case:
    setplay_id: int
    context: ContextFeatures
    success: bool
    cycle: int


@dataclass
class CaseBase:
    cases: list[Case] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.cases)

    def for_setplay(self, setplay_id: int) -> list[Case]:
        return [c for c in self.cases if c.setplay_id == setplay_id]


def record_outcome(
    base: CaseBase, setplay_id: int, context: ContextFeatures, success: bool, cycle: int
) -> CaseBase:
    """Append-only: returns a new CaseBase sharing no mutable state."""
    return CaseBase(cases=base.cases + [Case(setplay_id, context, success, cycle)])


def kernel(a: ContextFeatures, b: ContextFeatures) -> float:
    d2 = (a.ball_pos[0] - b.ball_pos[0]) ** 2 + (a.ball_pos[1] - b.ball_pos[1]) ** 2
    k = math.exp(-d2 / (2.0 * KERNEL_BANDWIDTH**2))
    if a.play_mode != b.play_mode:
        k *= PLAYMODE_MISMATCH_FACTOR
    return k


def score(base: CaseBase, setplay_id: int, context: ContextFeatures) -> float:
    num = ALPHA
    den = ALPHA + BETA
    for case in base.for_setplay(setplay_id):
        k = kernel(context, case.context)
        num += k * (1.0 if case.success else 0.0)
        den += k
    return num / den


class NoCandidateError(ValueError):
    pass


def cbr_select(base: CaseBase, candidates: list[int], context: ContextFeatures) -> int:
    if not candidates:
        raise NoCandidateError("no candidate setplays")
    best_id = None
    best_score = -math.inf
    for sid in sorted(candidates):
        s = score(base, sid, context)
        if s > best_score + 1e-15:
            best_id, best_score = sid, s
    assert best_id is not None
    return best_id


def feasible_setplays(
    library: dict[int, SetplayAst], view: WorldView, binding_radius: float = 25.0
) -> list[int]:
    """Ids whose activation condition holds and whose roles can be bound."""
    out = []
    for sid in sorted(library):
        ast = library[sid]
        if len(view.teammates) < len(ast.participants):
            continue
        if not evaluate(ast.activation, view):
            continue
        if bind_roles(ast, view, binding_radius) is None:
            continue
        out.append(sid)
    return out
