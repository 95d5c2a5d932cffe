"""Locomotion skill envelopes and per-cycle agent kinematics.

The envelopes are calibration constants for the abstract humanoid skills:
sprint averages 2.48 m/s over a 10 s episode from rest and tops out at
2.62 m/s, run reaches 1.52 m/s (1.41 m/s average) but can turn at 160 deg/s,
dribble is capped at 1.3 m/s.  The acceleration ramp time is solved from the
average/top speed pair: with a linear ramp of length T followed by cruising,
the 10-second average is vmax * (1 - T/20), so T = 20 * (1 - avg/vmax).

Mode changes pass through a 'transition' state lasting 0.9 s (45 cycles);
stopping to stand instead takes between the envelope's stop-time bounds,
picked deterministically from the gait phase at the stop command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import SimConfig
from .state import AgentState, Command
from ..geometry import wrap_angle


class ContractViolationError(ValueError):
    pass


@dataclass(frozen=True)
class SkillEnvelope:
    mode: str
    max_speed: float  # m/s
    max_turn_deg: float  # deg/s
    accel_ramp: float  # seconds from rest to max_speed
    stop_time: tuple[float, float]  # seconds, range
    transition_time: float = 0.9  # seconds


TRANSITION_CYCLES = 45  # 0.9 s at 0.02 s cycles


def _ramp(avg: float, vmax: float) -> float:
    return 20.0 * (1.0 - avg / vmax)


ENVELOPES: dict[str, SkillEnvelope] = {
    "stand": SkillEnvelope("stand", 0.0, 180.0, 1e-9, (0.0, 0.0)),
    "walk": SkillEnvelope("walk", 1.0, 180.0, 0.5, (0.5, 0.5)),
    "run": SkillEnvelope("run", 1.52, 160.0, _ramp(1.41, 1.52), (1.0, 1.6)),
    "sprint": SkillEnvelope("sprint", 2.62, 10.0, _ramp(2.48, 2.62), (1.0, 1.8)),
    "dribble": SkillEnvelope("dribble", 1.3, 126.0, 0.5, (0.5, 0.5)),
}

# Optional preset with the later, faster sprint (no published average to
# calibrate a ramp against; reuses the measured ramp).
IMPROVED_SPRINT_ENVELOPES: dict[str, SkillEnvelope] = dict(
    ENVELOPES,
    sprint=SkillEnvelope("sprint", 3.5, 10.0, ENVELOPES["sprint"].accel_ramp, (1.0, 1.8)),
)


def envelope(mode: str, envelopes: dict[str, SkillEnvelope] | None = None) -> SkillEnvelope:
    envs = envelopes or ENVELOPES
    try:
        return envs[mode]
    except KeyError:
        raise ContractViolationError(f"unknown locomotion mode: {mode!r}") from None


def envelope_cap(agent: AgentState, cfg: SimConfig) -> float:
    """Max speed the agent's current mode admits (transition: max of both)."""
    scale = cfg.type_scale(agent.robot_type)
    if agent.mode == "transition":
        frm = envelope(agent.transition_from or "stand").max_speed
        to = envelope(agent.transition_target or "stand").max_speed
        return max(frm, to) * scale
    return envelope(agent.mode).max_speed * scale


def accept_command(agent: AgentState, command: Command, cfg: SimConfig) -> None:
    """Install a move/dribble command on the agent (mutates)."""
    if command.kind == "dribble":
        mode = "dribble"
        env = envelope(mode)
        agent.cmd_speed = env.max_speed * cfg.type_scale(agent.robot_type)
        # Aim to complete the heading change over one decision period.
        delta = wrap_angle(command.direction - agent.heading)
        agent.cmd_turn_deg = math.degrees(delta) / (cfg.decision_period * cfg.dt)
    elif command.kind == "move":
        mode = command.mode
        envelope(mode)  # validates the mode name
        agent.cmd_speed = command.target_speed
        agent.cmd_turn_deg = command.turn_deg
    else:
        return

    current_target = (
        agent.transition_target if agent.mode == "transition" else agent.mode
    )
    if mode == current_target:
        return
    if mode == "stand":
        if agent.speed <= 0.0:
            agent.mode = "stand"
            agent.mode_timer = 0
            agent.transition_target = ""
            agent.transition_from = ""
            return
        env = envelope(current_target if current_target != "transition" else "walk")
        lo, hi = env.stop_time
        phase = (agent.mode_timer % TRANSITION_CYCLES) / TRANSITION_CYCLES
        duration = lo + (hi - lo) * phase
        duration = max(duration, cfg.dt)
        agent.stop_rate = agent.speed / duration
        agent.transition_from = current_target
        agent.transition_target = "stand"
        agent.mode = "transition"
        agent.mode_timer = int(math.ceil(duration / cfg.dt))
    else:
        agent.transition_from = current_target
        agent.transition_target = mode
        agent.mode = "transition"
        agent.mode_timer = TRANSITION_CYCLES


def apply_motion(agent: AgentState, dt: float, cfg: SimConfig) -> None:
    """Advance one cycle of locomotion under the installed command (mutates)."""
    scale = cfg.type_scale(agent.robot_type)

    if agent.mode == "transition":
        if agent.transition_target == "stand":
            agent.speed = max(0.0, agent.speed - agent.stop_rate * dt)
            agent.mode_timer -= 1
            if agent.mode_timer <= 0 or agent.speed <= 0.0:
                agent.mode = "stand"
                agent.speed = 0.0
                agent.mode_timer = 0
                agent.transition_target = ""
                agent.transition_from = ""
                agent.stop_rate = 0.0
            turn_limit = envelope("stand").max_turn_deg
        else:
            env = envelope(agent.transition_target)
            _ramp_speed(agent, env, scale, dt)
            frm = envelope(agent.transition_from or "stand")
            turn_limit = min(env.max_turn_deg, frm.max_turn_deg)
            agent.mode_timer -= 1
            if agent.mode_timer <= 0:
                agent.mode = agent.transition_target
                agent.transition_target = ""
                agent.transition_from = ""
                agent.mode_timer = 0
    else:
        env = envelope(agent.mode)
        _ramp_speed(agent, env, scale, dt)
        turn_limit = env.max_turn_deg
        agent.mode_timer += 1

    turn = max(-turn_limit, min(turn_limit, agent.cmd_turn_deg))
    if turn != 0.0:
        agent.heading = wrap_angle(agent.heading + math.radians(turn) * dt)
    if agent.speed != 0.0 and agent.on_pitch:
        agent.x += agent.speed * math.cos(agent.heading) * dt
        agent.y += agent.speed * math.sin(agent.heading) * dt


def _ramp_speed(agent: AgentState, env: SkillEnvelope, scale: float, dt: float) -> None:
    cap = env.max_speed * scale
    target = min(max(agent.cmd_speed, 0.0), cap)
    if cap <= 0.0:
        agent.speed = 0.0
        return
    rate = cap / env.accel_ramp
    if agent.speed < target:
        agent.speed = min(target, agent.speed + rate * dt)
    elif agent.speed > target:
        agent.speed = max(target, agent.speed - rate * dt)


def resolve_skill_command(
    agent: AgentState, command: Command, dt: float = 0.02, cfg: SimConfig | None = None
) -> AgentState:
    """Pure single-cycle resolution: accept ``command`` and advance ``dt``.

    The match loop uses the mutating pieces directly; this wrapper is the
    stand-alone contract (and raises ContractViolationError for unknown
    locomotion modes).
    """
    cfg = cfg or SimConfig()
    out = agent.clone()
    accept_command(out, command, cfg)
    apply_motion(out, dt, cfg)
    return out
