"""Distributed setplay execution driven by inter-agent messages.

Each participating agent owns one ExecutorState.  The lead agent walks the
step graph: it evaluates transitions and broadcasts (setplay id, step id)
on every step entry; sentinel step ids announce finish and abort.  Non-lead
agents act only on heard announcements.  The global abort condition is
checked by every agent on every call and dominates everything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..behaviors import (
    CONTROLLABLE_BALL_SPEED,
    SHOT_OVERSHOOT,
    dribble_command,
    hold_command,
    kick_command,
    move_command,
    shot_target,
)
from ..comms import STEP_ABORT, STEP_FINISH, TeamMessage, body_setplay_step, parse_body
from ..geometry import Point
from ..sim.state import Command
from .conditions import WorldView, evaluate
from .model import ActionSpec, SetplayAst


class UnboundRoleError(ValueError):
    pass


@dataclass
class ExecutorState:
    setplay: SetplayAst
    agent: str  # my agent id
    role: str  # my role
    role_binding: dict[str, str]  # role -> agent id, total over participants
    current_step_id: int = -1  # -1: not yet entered step 0
    step_entry_cycle: int = -1
    phase: str = "waiting"  # waiting | executing | finished | aborted
    diagnostic: str = ""

    def __post_init__(self):
        missing = [r for r in self.setplay.participants if r not in self.role_binding]
        if missing:
            raise UnboundRoleError(f"roles without agents: {missing}")

    @property
    def is_lead(self) -> bool:
        return self.role == self.setplay.lead_role

    @property
    def terminal(self) -> bool:
        return self.phase in ("finished", "aborted")


def participants_mask(binding: dict[str, str]) -> int:
    mask = 0
    for agent in binding.values():
        mask |= 1 << (int(agent[1:]) - 1)
    return mask


def _announcement(state: ExecutorState, cycle: int, step_id: int) -> TeamMessage:
    return TeamMessage(
        sender=state.agent,
        cycle=cycle,
        kind="setplayStep",
        payload=body_setplay_step(state.setplay.id, step_id, participants_mask(state.role_binding)),
    )


def step_executor(
    state: ExecutorState,
    view: WorldView,
    heard: TeamMessage | None,
    cycle: int,
) -> tuple[ExecutorState, list[TeamMessage], list[Command]]:
    """One decision-period tick; returns (state', says, commands)."""
    if state.terminal:
        return state, [], []

    st = replace(state)
    says: list[TeamMessage] = []
    commands: list[Command] = []

    # Abort dominance: checked every call, before anything else acts.
    if evaluate(st.setplay.abort, view, st.role_binding, st.step_entry_cycle):
        st.phase = "aborted"
        st.diagnostic = "abort condition"
        if st.is_lead:
            says.append(_announcement(st, cycle, STEP_ABORT))
        return st, says, commands

    if st.is_lead:
        if st.phase == "waiting":
            st.phase = "executing"
            st.current_step_id = 0
            st.step_entry_cycle = cycle
            says.append(_announcement(st, cycle, 0))
    else:
        update = _read_announcement(st, heard)
        if update is not None:
            step_id = update
            if step_id == STEP_FINISH:
                st.phase = "finished"
                return st, says, commands
            if step_id == STEP_ABORT:
                st.phase = "aborted"
                st.diagnostic = "lead aborted"
                return st, says, commands
            if step_id != st.current_step_id:
                st.current_step_id = step_id
                st.step_entry_cycle = cycle
            st.phase = "executing"
        if st.phase == "waiting":
            return st, says, commands  # nothing heard yet

    try:
        step = st.setplay.step(st.current_step_id)
    except KeyError:
        st.phase = "aborted"
        st.diagnostic = f"announced step {st.current_step_id} does not exist"
        return st, says, commands

    # My directive for this step, if any.
    for role, action in step.directives:
        if role != st.role:
            continue
        if role not in st.role_binding:
            st.phase = "aborted"
            st.diagnostic = f"directive for unbound role {role!r}"
            return st, says, commands
        cmd = _action_command(st, action, view)
        if cmd is not None:
            commands.append(cmd)
        break

    if st.is_lead:
        elapsed = (cycle - st.step_entry_cycle) * view.dt
        fired = None
        if elapsed >= step.wait_min and evaluate(step.condition, view, st.role_binding, st.step_entry_cycle):
            for t in step.transitions:
                if evaluate(t.condition, view, st.role_binding, st.step_entry_cycle):
                    fired = t
                    break
        if fired is None and elapsed >= step.wait_max:
            # Forced exit at the wait ceiling: first declared next, else abort.
            fired = next((t for t in step.transitions if t.kind == "next"), None)
            if fired is None:
                st.phase = "aborted"
                st.diagnostic = f"step {step.id} timed out with no way forward"
                says.append(_announcement(st, cycle, STEP_ABORT))
                return st, says, commands
        if fired is not None:
            if fired.kind == "finish":
                st.phase = "finished"
                says.append(_announcement(st, cycle, STEP_FINISH))
            elif fired.kind == "abort":
                st.phase = "aborted"
                st.diagnostic = f"abort transition in step {step.id}"
                says.append(_announcement(st, cycle, STEP_ABORT))
            else:
                st.current_step_id = fired.target
                st.step_entry_cycle = cycle
                says.append(_announcement(st, cycle, fired.target))

    return st, says, commands


def _read_announcement(state: ExecutorState, heard: TeamMessage | None) -> int | None:
    if heard is None or heard.kind != "setplayStep":
        return None
    if heard.sender[0] != state.agent[0]:
        return None  # opposing team chatter
    fields = parse_body(heard)
    if fields["setplay_id"] != state.setplay.id:
        return None
    return fields["step_id"]


def _action_command(state: ExecutorState, action: ActionSpec, view: WorldView) -> Command | None:
    me = view.teammates.get(state.agent)
    if me is None:
        return None
    heading = view.headings.get(state.agent, 0.0)
    controllable = view.ball_speed <= CONTROLLABLE_BALL_SPEED
    i_have_ball = controllable and (
        view.ball_owner == state.agent or _close(me, view.ball_pos, 0.45)
    )

    if action.kind == "moveTo":
        return move_command(state.agent, me, heading, (action.x, action.y), urgency=0.8)
    if action.kind == "hold":
        return hold_command(state.agent)
    if action.kind == "dribble":
        if not i_have_ball:
            return move_command(state.agent, me, heading, view.ball_pos, urgency=0.8)
        return dribble_command(state.agent, math.radians(action.direction_deg))
    if action.kind in ("pass", "shoot"):
        if not i_have_ball:
            return move_command(state.agent, me, heading, view.ball_pos, urgency=0.9)
        if action.kind == "pass":
            target_agent = state.role_binding.get(action.to_role)
            target = view.teammates.get(target_agent or "")
            if target is None:
                state.diagnostic = f"pass target role {action.to_role!r} unbound"
                state.phase = "aborted"
                return None
            return kick_command(state.agent, view.ball_pos, target)
        aim = shot_target(view.ball_pos, view.goal_center, view.opponents)
        return kick_command(state.agent, view.ball_pos, aim, overshoot=SHOT_OVERSHOOT)
    return None


def _close(a: Point, b: Point, radius: float) -> bool:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 <= radius * radius


def bind_roles(ast: SetplayAst, view: WorldView, binding_radius: float = 25.0) -> dict[str, str] | None:
    """Greedy nearest-teammate binding; lead goes to the ball owner/nearest.

    Returns None when the roles cannot be bound to distinct on-pitch
    teammates within ``binding_radius`` of their anchors.
    """
    available = dict(view.teammates)
    binding: dict[str, str] = {}

    def take(role: str, anchor: Point) -> bool:
        best, best_d = None, math.inf
        for agent, pos in available.items():
            d = math.hypot(pos[0] - anchor[0], pos[1] - anchor[1])
            if d < best_d - 1e-12 or (abs(d - best_d) <= 1e-12 and (best is None or agent < best)):
                best, best_d = agent, d
        if best is None or best_d > binding_radius:
            return False
        binding[role] = best
        del available[best]
        return True

    lead_anchor = view.ball_pos
    if view.ball_owner and view.ball_owner in available:
        binding[ast.lead_role] = view.ball_owner
        del available[view.ball_owner]
    elif not take(ast.lead_role, lead_anchor):
        return None

    for role in ast.participants[1:]:
        if not take(role, _role_anchor(ast, role, view)):
            return None
    return binding


def _role_anchor(ast: SetplayAst, role: str, view: WorldView) -> Point:
    for step in ast.steps:
        for r, action in step.directives:
            if r == role and action.kind == "moveTo":
                return (action.x, action.y)
    return view.ball_pos
