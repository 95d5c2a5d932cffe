"""Condition evaluation against a team's view of the world.

WorldView is the ground the setplay machinery (and the team controller)
stands on: one team's snapshot of ball, teammates, opponents, play mode and
clock.  Conditions are pure predicates over a view plus the executor's role
binding and step-entry cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..geometry import Point, segment_distance
from .model import Condition

PASS_CORRIDOR = 1.0  # m an opponent must keep from a pass lane to allow it
SHOT_CORRIDOR = 0.75


@dataclass
class WorldView:
    """One team's snapshot, in the team frame: we always attack +x.

    The team layer mirrors field coordinates for the right team before
    building its view, so setplays, formations and conditions are written
    once and work for both sides.
    """

    cycle: int
    play_mode: str
    team: str  # viewing team (used to filter messages)
    ball_pos: Point
    ball_vel: Point
    teammates: dict[str, Point]  # on-pitch only, includes self
    opponents: dict[str, Point]
    headings: dict[str, float] = field(default_factory=dict)
    ball_owner: str = ""  # agent id controlling the ball, '' if loose
    score: tuple[int, int] = (0, 0)
    field: tuple[float, float] = (15.0, 10.0)
    restart_team: str = ""
    dt: float = 0.02

    @property
    def goal_center(self) -> Point:
        return (self.field[0], 0.0)

    @property
    def own_goal_center(self) -> Point:
        return (-self.field[0], 0.0)

    @property
    def ball_speed(self) -> float:
        return math.hypot(self.ball_vel[0], self.ball_vel[1])

    def nearest_opponent_distance(self, p: Point) -> float:
        if not self.opponents:
            return math.inf
        return min(math.hypot(p[0] - o[0], p[1] - o[1]) for o in self.opponents.values())


def corridor_clear(view: WorldView, a: Point, b: Point, margin: float) -> bool:
    return all(
        segment_distance(o, a, b) >= margin for o in view.opponents.values()
    )


def evaluate(
    cond: Condition,
    view: WorldView,
    binding: dict[str, str] | None = None,
    step_entry_cycle: int | None = None,
) -> bool:
    binding = binding or {}
    op = cond.op
    if op == "true":
        return True
    if op == "false":
        return False
    if op == "and":
        return all(evaluate(c, view, binding, step_entry_cycle) for c in cond.args)
    if op == "or":
        return any(evaluate(c, view, binding, step_entry_cycle) for c in cond.args)
    if op == "not":
        return not evaluate(cond.args[0], view, binding, step_entry_cycle)
    if op == "play-mode-is":
        return view.play_mode == cond.args[0]
    if op == "ball-in-region":
        x1, y1, x2, y2 = cond.args
        bx, by = view.ball_pos
        return min(x1, x2) <= bx <= max(x1, x2) and min(y1, y2) <= by <= max(y1, y2)
    if op == "can-pass":
        src = _role_pos(cond.args[0], view, binding)
        dst = _role_pos(cond.args[1], view, binding)
        if src is None or dst is None:
            return False
        return corridor_clear(view, src, dst, PASS_CORRIDOR)
    if op == "clear-shot":
        src = _role_pos(cond.args[0], view, binding)
        if src is None:
            return False
        return corridor_clear(view, src, view.goal_center, SHOT_CORRIDOR)
    if op == "elapsed":
        if step_entry_cycle is None:
            return False
        return (view.cycle - step_entry_cycle) * view.dt >= cond.args[0]
    if op == "opponents-within":
        n, x1, y1, x2, y2 = cond.args
        count = sum(
            1
            for ox, oy in view.opponents.values()
            if min(x1, x2) <= ox <= max(x1, x2) and min(y1, y2) <= oy <= max(y1, y2)
        )
        return count >= n
    raise ValueError(f"unknown condition op {op!r}")


def _role_pos(role: str, view: WorldView, binding: dict[str, str]) -> Point | None:
    agent = binding.get(role)
    if agent is None:
        return None
    return view.teammates.get(agent)
