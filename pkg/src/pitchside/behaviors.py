"""Command synthesis shared by the setplay executor and the team controller."""

from __future__ import annotations

import math

from .geometry import Point, wrap_angle
from .sim.kick import LONG_KICK
from .sim.state import Command


def move_command(
    agent_id: str,
    pos: Point,
    heading: float,
    target: Point,
    *,
    urgency: float = 0.5,
    period_s: float = 0.06,
    arrive_radius: float = 0.25,
) -> Command:
    """Steer toward ``target``: mode and speed scale with distance/urgency."""
    dx, dy = target[0] - pos[0], target[1] - pos[1]
    dist = math.hypot(dx, dy)
    if dist <= arrive_radius:
        return Command(agent=agent_id, kind="move", target_speed=0.0, turn_deg=0.0, mode="stand")
    desired = math.atan2(dy, dx)
    delta = wrap_angle(desired - heading)
    turn_deg = math.degrees(delta) / period_s
    facing = abs(delta) < math.radians(30.0)
    if dist > 8.0 and urgency > 0.7 and facing:
        mode, speed = "sprint", 2.62
    elif dist > 2.0 and facing:
        mode, speed = "run", 1.52
    else:
        mode, speed = "walk", min(1.0, max(0.3, dist))
    return Command(agent=agent_id, kind="move", target_speed=speed, turn_deg=turn_deg, mode=mode)


def hold_command(agent_id: str) -> Command:
    return Command(agent=agent_id, kind="move", target_speed=0.0, turn_deg=0.0, mode="stand")


def kick_command(
    agent_id: str, pos: Point, target: Point, *, kick_min=2.5, kick_max=12.5, overshoot=0.0
) -> Command:
    """Kick toward ``target``; beyond the contextual range, use the long kick.

    ``overshoot`` adds carry past the target: passes want the ball to die at
    the receiver (0), shots must cross the goal line, clearances want range.
    """
    dx, dy = target[0] - pos[0], target[1] - pos[1]
    dist = math.hypot(dx, dy) + overshoot
    direction = math.atan2(dy, dx)
    if dist > kick_max:
        return Command(agent=agent_id, kind="kick", target_distance=LONG_KICK, direction=direction)
    return Command(
        agent=agent_id,
        kind="kick",
        target_distance=min(kick_max, max(kick_min, dist)),
        direction=direction,
    )


def dribble_command(agent_id: str, direction: float) -> Command:
    return Command(agent=agent_id, kind="dribble", direction=direction)


SHOT_OVERSHOOT = 2.5
CONTROLLABLE_BALL_SPEED = 1.5  # m/s; faster balls are tracked, not kicked


def shot_target(ball_pos: Point, goal_center: Point, opponents: dict, goal_width=2.1) -> Point:
    """Aim inside the mouth, at the corner with more room past the keeper."""
    gx, gy = goal_center
    aims = [(gx, gy - goal_width * 0.33), (gx, gy + goal_width * 0.33), (gx, gy)]
    if not opponents:
        return aims[2]

    def clearance(aim):
        return min(
            _point_segment_distance(o, ball_pos, aim) for o in opponents.values()
        )

    return max(aims, key=clearance)


def _point_segment_distance(p, a, b):
    abx, aby = b[0] - a[0], b[1] - a[1]
    den = abx * abx + aby * aby
    if den == 0.0:
        return math.hypot(p[0] - a[0], p[1] - a[1])
    t = min(1.0, max(0.0, ((p[0] - a[0]) * abx + (p[1] - a[1]) * aby) / den))
    return math.hypot(p[0] - a[0] - t * abx, p[1] - a[1] - t * aby)
