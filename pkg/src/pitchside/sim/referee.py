"""Automated referee: crowding and pushing fouls.

Crowding: when more than ``crowding_limit`` agents of one team stand within
``crowding_radius`` of the ball, the farthest-from-ball offenders are
removed until the limit holds.  Pushing: an agent above the pushing speed
threshold that moves into disc overlap with an opponent is removed.
Removed agents are parked off-pitch and queue to reenter at the side line
opposite to where the foul happened, after the penalty delay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import SimConfig
from .state import AgentState, PenaltyRecord, WorldState
from ..geometry import wrap_angle as _wrap


@dataclass(frozen=True)
class Ruling:
    cycle: int
    kind: str  # 'crowding' | 'pushing'
    agent: str
    reentry_cycle: int
    reentry_side: int


def _remove(world: WorldState, agent: AgentState, kind: str, cfg: SimConfig, rulings: list[Ruling]) -> None:
    side = -1 if agent.y > 0 else 1
    reentry = world.cycle + cfg.penalty_cycles
    agent.on_pitch = False
    agent.speed = 0.0
    agent.mode = "stand"
    agent.mode_timer = 0
    agent.transition_target = ""
    agent.transition_from = ""
    agent.cmd_speed = 0.0
    agent.cmd_turn_deg = 0.0
    agent.x = max(-cfg.half_length_x, min(cfg.half_length_x, agent.x))
    agent.y = side * (cfg.half_width_y + cfg.margin)
    if world.dribbler == agent.agent_id:
        world.dribbler = ""
    world.penalty_queue.append(
        PenaltyRecord(agent=agent.agent_id, reentry_cycle=reentry, reentry_side=side)
    )
    rulings.append(
        Ruling(cycle=world.cycle, kind=kind, agent=agent.agent_id, reentry_cycle=reentry, reentry_side=side)
    )
    world.cycle_events.append(("foul", kind, agent.agent_id, reentry))


def adjudicate_in_place(world: WorldState, cfg: SimConfig) -> list[Ruling]:
    rulings: list[Ruling] = []

    # Pushing first: needs this cycle's movement, checked pairwise in id order.
    # A push is a deep overlap (beyond the grazing band contact resolution
    # absorbs) entered at speed with the body driving into the opponent.
    overlap = 2.0 * cfg.agent_radius
    deep = overlap - 0.05
    onpitch = [a for a in world.agents if a.on_pitch]
    for i, a in enumerate(onpitch):
        for b in onpitch[i + 1 :]:
            if a.team == b.team or not (a.on_pitch and b.on_pitch):
                continue
            dx, dy = a.x - b.x, a.y - b.y
            if dx * dx + dy * dy >= deep * deep:
                continue
            dist = math.hypot(dx, dy)
            for off, other in ((a, b), (b, a)):
                if not off.on_pitch or off.speed <= cfg.pushing_speed:
                    continue
                prev = world.prev_positions.get(off.agent_id)
                prev_other = world.prev_positions.get(other.agent_id)
                if prev is None or prev_other is None:
                    continue
                prev_dist = math.hypot(prev[0] - prev_other[0], prev[1] - prev_other[1])
                if prev_dist <= dist:
                    continue
                to_other = math.atan2(other.y - off.y, other.x - off.x)
                heading_off = abs(_wrap(to_other - off.heading))
                if heading_off < math.pi / 4:
                    _remove(world, off, "pushing", cfg, rulings)

    # Crowding per team: remove farthest-from-ball offenders down to the limit.
    r2 = cfg.crowding_radius * cfg.crowding_radius
    for team in ("L", "R"):
        while True:
            near = [
                a
                for a in world.agents
                if a.team == team
                and a.on_pitch
                and (a.x - world.ball_x) ** 2 + (a.y - world.ball_y) ** 2 <= r2
            ]
            if len(near) <= cfg.crowding_limit:
                break
            worst = max(
                near,
                key=lambda a: ((a.x - world.ball_x) ** 2 + (a.y - world.ball_y) ** 2, a.num),
            )
            _remove(world, worst, "crowding", cfg, rulings)

    return rulings


def referee_adjudicate(world: WorldState, cfg: SimConfig | None = None) -> tuple[list[Ruling], WorldState]:
    """Pure adjudication: returns the rulings and the adjudicated world."""
    cfg = cfg or SimConfig()
    out = world.clone()
    out.prev_positions = dict(world.prev_positions)
    rulings = adjudicate_in_place(out, cfg)
    return rulings, out
