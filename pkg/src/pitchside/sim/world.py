"""World stepping, restarts, goals and observation.

step_world is a pure function of (world, commands, rng state): it clones the
input world, advances one 0.02 s cycle and returns the successor.  Commands
are accepted only on decision cycles (cycle % 3 == 0); on other cycles they
are discarded with a diagnostic event.  Agents are processed in ascending
id order everywhere, which makes collision resolution and referee calls
deterministic and replays byte-identical.
"""

from __future__ import annotations

import math

from .config import SimConfig
from .kick import LONG_KICK, launch_speed, sample_kick_outcome
from .referee import adjudicate_in_place
from .skills import accept_command, apply_motion
from .state import (
    AgentState,
    Command,
    CommandSet,
    Observation,
    PlayMode,
    SeenObject,
    WorldState,
)
from ..geometry import wrap_angle

_DRIBBLE_CARRY = 0.09  # ball carried this far ahead of a dribbling agent


def default_lineup(team: str, cfg: SimConfig) -> list[AgentState]:
    """A plain 4-4-2-ish lineup used when no formation is supplied."""
    sign = -1.0 if team == "L" else 1.0
    xs = [14.0, 10.0, 10.0, 10.0, 10.0, 5.0, 5.0, 5.0, 5.0, 1.5, 1.5]
    ys = [0.0, -7.0, -2.5, 2.5, 7.0, -7.0, -2.5, 2.5, 7.0, -2.0, 2.0]
    heading = 0.0 if team == "L" else math.pi
    return [
        AgentState(
            team=team,
            num=i + 1,
            x=sign * xs[i],
            y=ys[i],
            heading=heading,
            speed=0.0,
            robot_type=cfg.lineup_types[i],
        )
        for i in range(11)
    ]


def initial_world(cfg: SimConfig | None = None, play_mode: str = PlayMode.KICKOFF_LEFT) -> WorldState:
    cfg = cfg or SimConfig()
    world = WorldState(
        cycle=0,
        ball_x=0.0,
        ball_y=0.0,
        ball_vx=0.0,
        ball_vy=0.0,
        agents=default_lineup("L", cfg) + default_lineup("R", cfg),
        play_mode=play_mode,
    )
    if play_mode in PlayMode.RESTARTS:
        world.restart_team = "L" if play_mode != PlayMode.KICKOFF_RIGHT else "R"
        world.restart_countdown = cfg.restart_grace_cycles
    return world


def _as_command_set(commands) -> CommandSet:
    if isinstance(commands, CommandSet):
        return commands
    return CommandSet(list(commands))


def step_world(world: WorldState, commands, rng, cfg: SimConfig | None = None) -> WorldState:
    cfg = cfg or SimConfig()
    cmds = _as_command_set(commands)

    w = world.clone()
    w.cycle = world.cycle + 1
    w.prev_positions = {a.agent_id: (a.x, a.y) for a in w.agents}

    _update_ball_control(w, cfg)

    if len(cmds):
        if world.cycle % cfg.decision_period == 0 and world.play_mode != PlayMode.GAME_OVER:
            _apply_commands(w, cmds, rng, cfg)
        else:
            w.cycle_events.append(("discarded-commands", len(cmds)))

    _process_reentries(w, cfg)
    for agent in w.agents:
        apply_motion(agent, cfg.dt, cfg)
    # Referee sees raw post-motion overlaps (pushing), then contacts resolve.
    adjudicate_in_place(w, cfg)
    _resolve_agent_overlaps(w, cfg)
    _move_ball(w, cfg)

    _update_play_state(w, cfg)
    _clamp_positions(w, cfg)
    return w


def _update_ball_control(w: WorldState, cfg: SimConfig) -> None:
    r2 = cfg.kickable_radius * cfg.kickable_radius
    for a in w.agents:
        a.has_ball_control = (
            a.on_pitch
            and (a.x - w.ball_x) ** 2 + (a.y - w.ball_y) ** 2 <= r2
        )


def _apply_commands(w: WorldState, cmds: CommandSet, rng, cfg: SimConfig) -> None:
    for agent in w.agents:  # fixed order => deterministic rng consumption
        cmd = cmds.get(agent.agent_id)
        if cmd is None:
            continue
        if not agent.on_pitch:
            w.cycle_events.append(("penalized-command", agent.agent_id))
            continue
        if cmd.kind == "kick":
            _execute_kick(w, agent, cmd, rng, cfg)
        elif cmd.kind in ("move", "dribble"):
            if cmd.kind == "dribble" and agent.has_ball_control and w.dribbler == "":
                w.dribbler = agent.agent_id
            if cmd.kind == "move" and w.dribbler == agent.agent_id and cmd.mode != "dribble":
                w.dribbler = ""
            accept_command(agent, cmd, cfg)


def _execute_kick(w: WorldState, agent: AgentState, cmd: Command, rng, cfg: SimConfig) -> None:
    if not agent.has_ball_control:
        w.cycle_events.append(("kick-out-of-reach", agent.agent_id))
        return
    if w.play_mode in PlayMode.RESTARTS and agent.team != w.restart_team:
        w.cycle_events.append(("kick-not-restart-team", agent.agent_id))
        return
    dx, dy = sample_kick_outcome(cmd.target_distance, cmd.direction, rng, cfg)
    dist = math.hypot(dx, dy)
    speed = launch_speed(dist, cfg)
    if dist > 0.0:
        w.ball_vx = speed * dx / dist
        w.ball_vy = speed * dy / dist
    w.dribbler = ""
    w.last_touch = agent.agent_id
    target = "long" if cmd.target_distance == LONG_KICK else f"{cmd.target_distance:.3f}"
    w.cycle_events.append(("kick", agent.agent_id, target, f"{cmd.direction:.3f}"))
    if w.play_mode in PlayMode.RESTARTS:
        w.play_mode = PlayMode.PLAY_ON
        w.restart_team = ""
        w.restart_countdown = 0
        w.cycle_events.append(("restart-taken", agent.agent_id))


def _resolve_agent_overlaps(w: WorldState, cfg: SimConfig) -> None:
    overlap = 2.0 * cfg.agent_radius
    onpitch = [a for a in w.agents if a.on_pitch]
    for i, a in enumerate(onpitch):
        for b in onpitch[i + 1 :]:
            dx, dy = b.x - a.x, b.y - a.y
            d2 = dx * dx + dy * dy
            if d2 >= overlap * overlap or d2 == 0.0:
                continue
            dist = math.sqrt(d2)
            push = (overlap - dist) / 2.0
            ux, uy = dx / dist, dy / dist
            a.x -= ux * push
            a.y -= uy * push
            b.x += ux * push
            b.y += uy * push


def _move_ball(w: WorldState, cfg: SimConfig) -> None:
    if w.dribbler:
        carrier = w.agent(w.dribbler)
        effective = carrier.mode == "dribble" or (
            carrier.mode == "transition" and carrier.transition_target == "dribble"
        )
        if effective and carrier.on_pitch:
            w.ball_x = carrier.x + _DRIBBLE_CARRY * math.cos(carrier.heading)
            w.ball_y = carrier.y + _DRIBBLE_CARRY * math.sin(carrier.heading)
            w.ball_vx = carrier.speed * math.cos(carrier.heading)
            w.ball_vy = carrier.speed * math.sin(carrier.heading)
            w.last_touch = carrier.agent_id
            return
        w.dribbler = ""
    w.ball_x += w.ball_vx * cfg.dt
    w.ball_y += w.ball_vy * cfg.dt
    w.ball_vx *= cfg.ball_decay
    w.ball_vy *= cfg.ball_decay
    if math.hypot(w.ball_vx, w.ball_vy) < cfg.ball_stop_speed:
        w.ball_vx = 0.0
        w.ball_vy = 0.0


def _process_reentries(w: WorldState, cfg: SimConfig) -> None:
    due = [p for p in w.penalty_queue if p.reentry_cycle <= w.cycle]
    if not due:
        return
    w.penalty_queue = [p for p in w.penalty_queue if p.reentry_cycle > w.cycle]
    for pen in due:
        agent = w.agent(pen.agent)
        agent.on_pitch = True
        agent.y = pen.reentry_side * cfg.half_width_y
        agent.speed = 0.0
        agent.mode = "stand"
        w.cycle_events.append(("reentry", pen.agent))


def _update_play_state(w: WorldState, cfg: SimConfig) -> None:
    total = cfg.halves * cfg.half_cycles
    if w.play_mode == PlayMode.GAME_OVER:
        return

    if w.goal_pause > 0:
        w.goal_pause -= 1
        if w.goal_pause == 0:
            w.play_mode = w.next_kickoff
            w.restart_team = "L" if w.next_kickoff == PlayMode.KICKOFF_LEFT else "R"
            w.restart_countdown = cfg.restart_grace_cycles
            w.next_kickoff = ""
            w.ball_x = w.ball_y = w.ball_vx = w.ball_vy = 0.0
    elif w.play_mode == PlayMode.PLAY_ON:
        _check_ball_exit(w, cfg)
    elif w.play_mode in PlayMode.RESTARTS:
        w.restart_countdown -= 1
        if w.restart_countdown <= 0:
            w.cycle_events.append(("restart-timeout", w.restart_team))
            w.play_mode = PlayMode.PLAY_ON
            w.restart_team = ""

    if w.cycle == cfg.half_cycles and cfg.halves > 1 and w.play_mode != PlayMode.GAME_OVER:
        w.play_mode = PlayMode.KICKOFF_RIGHT
        w.restart_team = "R"
        w.restart_countdown = cfg.restart_grace_cycles
        w.ball_x = w.ball_y = w.ball_vx = w.ball_vy = 0.0
        w.dribbler = ""
        w.cycle_events.append(("half-time",))
    if w.cycle >= total:
        w.play_mode = PlayMode.GAME_OVER
        w.cycle_events.append(("full-time",))


def _check_ball_exit(w: WorldState, cfg: SimConfig) -> None:
    hx, hy = cfg.half_length_x, cfg.half_width_y
    x, y = w.ball_x, w.ball_y
    if abs(x) <= hx and abs(y) <= hy:
        return

    # Goal? Extrapolate the crossing y where the ball passed the goal line.
    if abs(x) > hx:
        side = 1.0 if x > 0 else -1.0
        prev_x = x - w.ball_vx * cfg.dt
        prev_y = y - w.ball_vy * cfg.dt
        t = (side * hx - prev_x) / (x - prev_x) if x != prev_x else 0.0
        cross_y = prev_y + t * (y - prev_y)
        if abs(cross_y) <= cfg.goal_width / 2.0:
            scorer = "L" if side > 0 else "R"  # L attacks +x
            if scorer == "L":
                w.score_l += 1
                w.play_mode = PlayMode.GOAL_LEFT
                w.next_kickoff = PlayMode.KICKOFF_RIGHT
            else:
                w.score_r += 1
                w.play_mode = PlayMode.GOAL_RIGHT
                w.next_kickoff = PlayMode.KICKOFF_LEFT
            w.goal_pause = cfg.goal_pause_cycles
            w.ball_vx = w.ball_vy = 0.0
            w.dribbler = ""
            w.cycle_events.append(("goal", scorer))
            return
        # Over the goal line but outside the mouth: corner or goal kick.
        attacking = "L" if side > 0 else "R"
        last_team = w.last_touch[0] if w.last_touch else ""
        if last_team == attacking:
            w.play_mode = PlayMode.GOAL_KICK
            w.restart_team = "R" if attacking == "L" else "L"
            w.ball_x = side * (hx - 2.0)
            w.ball_y = 0.0
        else:
            # Corner spot sits 0.5 m inside both lines so restart kicks with
            # angular noise cannot immediately leave the pitch.
            w.play_mode = PlayMode.CORNER
            w.restart_team = attacking
            w.ball_x = side * (hx - 0.5)
            w.ball_y = (hy - 0.5) if cross_y > 0 else -(hy - 0.5)
        w.ball_vx = w.ball_vy = 0.0
        w.restart_countdown = cfg.restart_grace_cycles
        w.dribbler = ""
        w.cycle_events.append((w.play_mode, w.restart_team))
        return

    # Side line: free kick for the team that did not touch last.
    last_team = w.last_touch[0] if w.last_touch else "L"
    w.play_mode = PlayMode.FREE_KICK
    w.restart_team = "R" if last_team == "L" else "L"
    w.ball_x = max(-hx + 0.5, min(hx - 0.5, x))
    w.ball_y = (hy - 0.5) if y > 0 else (-hy + 0.5)
    w.ball_vx = w.ball_vy = 0.0
    w.restart_countdown = cfg.restart_grace_cycles
    w.dribbler = ""
    w.cycle_events.append((PlayMode.FREE_KICK, w.restart_team))


def _clamp_positions(w: WorldState, cfg: SimConfig) -> None:
    hx = cfg.half_length_x + cfg.margin
    hy = cfg.half_width_y + cfg.margin
    for a in w.agents:
        if a.x < -hx:
            a.x = -hx
        elif a.x > hx:
            a.x = hx
        if a.y < -hy:
            a.y = -hy
        elif a.y > hy:
            a.y = hy
    w.ball_x = max(-hx, min(hx, w.ball_x))
    w.ball_y = max(-hy, min(hy, w.ball_y))


class PerceptionCycleError(ValueError):
    pass


def observe(world: WorldState, agent_id: str, rng, cfg: SimConfig | None = None) -> Observation | None:
    """Noisy cone-limited view for one agent; None while penalized.

    Perceptions exist on decision cycles only; calling on other cycles is a
    contract violation.  The heard slot is filled by the comms channel, not
    here.
    """
    cfg = cfg or SimConfig()
    if world.cycle % cfg.decision_period != 0:
        raise PerceptionCycleError(
            f"perceptions occur every {cfg.decision_period} cycles; cycle={world.cycle}"
        )
    me = world.agent(agent_id)
    if not me.on_pitch:
        return None

    half_angle = math.radians(cfg.vision_half_angle_deg)
    seen: list[SeenObject] = []

    def consider(object_id: str, ox: float, oy: float) -> None:
        dx, dy = ox - me.x, oy - me.y
        dist = math.hypot(dx, dy)
        if dist <= 0.0 or dist > cfg.vision_range:
            return
        bearing = wrap_angle(math.atan2(dy, dx) - me.heading)
        if abs(bearing) > half_angle:
            return
        if cfg.distance_noise_frac:
            dist = max(1e-6, dist * (1.0 + cfg.distance_noise_frac * rng.standard_normal()))
        if cfg.bearing_noise_deg:
            bearing = wrap_angle(
                bearing + math.radians(cfg.bearing_noise_deg) * rng.standard_normal()
            )
        seen.append(SeenObject(object_id=object_id, distance=dist, bearing=bearing))

    consider("ball", world.ball_x, world.ball_y)
    for other in world.agents:
        if other is me or not other.on_pitch:
            continue
        consider(other.agent_id, other.x, other.y)

    return Observation(
        observer=agent_id,
        cycle=world.cycle,
        seen=tuple(seen),
        heard=None,
        heading=me.heading,
        speed=me.speed,
        play_mode=world.play_mode,
        score=(world.score_l, world.score_r),
    )
