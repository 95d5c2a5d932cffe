"""Baseline team controller: glues formations, strategy, setplays and comms.

Everything the controller computes happens in the team frame, where the
controlled team always attacks +x.  For the right team the world is
mirrored (a 180-degree rotation about the field center) when building the
view, and kick/dribble directions are rotated back when commands are
emitted.  One setplay file or formation file therefore serves both teams.

Within a decision period each agent says at most one message; priority per
agent is setplay announcements first, then coach switches, then ball
chatter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .behaviors import (
    CONTROLLABLE_BALL_SPEED,
    SHOT_OVERSHOOT,
    dribble_command,
    hold_command,
    kick_command,
    move_command,
)
from .comms import Channel, TeamMessage, body_ball_info, parse_body
from .formation import Formation, FluxMap, Assignment, identity_assignment, dpre_assignment
from .geometry import wrap_angle
from .setplay import (
    CaseBase,
    ContextFeatures,
    ExecutorState,
    SetplayAst,
    WorldView,
    bind_roles,
    cbr_select,
    feasible_setplays,
    record_outcome,
    step_executor,
)
from .sim.config import SimConfig
from .sim.state import Command, PlayMode, WorldState
from .stats import LiveStats
from .strategy import CoachState, Strategy, choose_action, coach_tick, generate_candidates

DPRE_PERIOD = 15  # cycles between role-exchange evaluations
PRESS_BASE = 3.0  # m; mentality stretches how far defenders chase the ball


def mirror_point(p):
    return (-p[0], -p[1])


def mirror_mode(mode: str) -> str:
    swaps = {
        PlayMode.KICKOFF_LEFT: PlayMode.KICKOFF_RIGHT,
        PlayMode.KICKOFF_RIGHT: PlayMode.KICKOFF_LEFT,
        PlayMode.GOAL_LEFT: PlayMode.GOAL_RIGHT,
        PlayMode.GOAL_RIGHT: PlayMode.GOAL_LEFT,
    }
    return swaps.get(mode, mode)


def build_view(world: WorldState, team: str, cfg: SimConfig) -> WorldView:
    """Team-frame snapshot; for team R all geometry is rotated 180 degrees
    and side-qualified play modes are swapped so 'kickoff-left' always
    reads as 'our kickoff'."""
    mirror = team == "R"

    def pt(x, y):
        return (-x, -y) if mirror else (x, y)

    teammates, opponents, headings = {}, {}, {}
    for a in world.agents:
        if not a.on_pitch:
            continue
        pos = pt(a.x, a.y)
        headings[a.agent_id] = wrap_angle(a.heading + math.pi) if mirror else a.heading
        if a.team == team:
            teammates[a.agent_id] = pos
        else:
            opponents[a.agent_id] = pos

    owner = ""
    best = cfg.kickable_radius
    for a in world.agents:
        if not a.on_pitch:
            continue
        d = math.hypot(a.x - world.ball_x, a.y - world.ball_y)
        if d < best:
            owner, best = a.agent_id, d

    play_mode = mirror_mode(world.play_mode) if mirror else world.play_mode
    if world.restart_team:
        restart = "L" if world.restart_team == team else "R"
    else:
        restart = ""
    score = (world.score_l, world.score_r)
    if mirror:
        score = (score[1], score[0])

    return WorldView(
        cycle=world.cycle,
        play_mode=play_mode,
        team=team,
        ball_pos=pt(world.ball_x, world.ball_y),
        ball_vel=pt(world.ball_vx, world.ball_vy),
        teammates=teammates,
        opponents=opponents,
        headings=headings,
        ball_owner=owner,
        score=score,
        field=(cfg.half_length_x, cfg.half_width_y),
        restart_team=restart,
        dt=cfg.dt,
    )


def unmirror_command(cmd: Command, mirror: bool) -> Command:
    if not mirror or cmd.kind not in ("kick", "dribble"):
        return cmd
    return Command(
        agent=cmd.agent,
        kind=cmd.kind,
        target_speed=cmd.target_speed,
        turn_deg=cmd.turn_deg,
        mode=cmd.mode,
        target_distance=cmd.target_distance,
        direction=wrap_angle(cmd.direction + math.pi),
        say=cmd.say,
    )


@dataclass
class ActiveSetplay:
    setplay: SetplayAst
    binding: dict[str, str]
    executors: dict[str, ExecutorState]
    context: ContextFeatures
    start_cycle: int


class TeamController:
    def __init__(
        self,
        team: str,
        strategy: Strategy,
        formations: dict[str, Formation],
        flux_map: FluxMap,
        setplay_library: dict[int, SetplayAst],
        cfg: SimConfig,
        channel: Channel,
        *,
        setplays_enabled: bool = True,
        total_cycles: int | None = None,
    ):
        self.team = team
        self.strategy = strategy
        self.formations = formations
        self.flux_map = flux_map
        self.setplay_library = setplay_library
        self.cfg = cfg
        self.channel = channel
        self.setplays_enabled = setplays_enabled
        self.total_cycles = total_cycles or cfg.halves * cfg.half_cycles

        self.tactic_name = strategy.initial
        self.assignment: Assignment = identity_assignment()
        self.case_base = CaseBase()
        self.coach_state = CoachState()
        self.live = LiveStats()
        self.active: ActiveSetplay | None = None
        self.events: list[tuple] = []  # drained by the match loop for the log
        self.hold_streak = 0  # consecutive periods the owner chose to hold

    @property
    def tactic(self):
        return self.strategy.tactics[self.tactic_name]

    def formation_for(self, situation: str) -> Formation:
        names = self.tactic.formations
        name = names.get(situation) or names.get("default")
        if name and name in self.formations:
            return self.formations[name]
        return next(iter(self.formations.values()))

    # -- main entry ---------------------------------------------------------

    def decide(self, world: WorldState, heard: dict[str, TeamMessage]) -> tuple[list[Command], list[TeamMessage]]:
        cfg = self.cfg
        mirror = self.team == "R"
        view = build_view(world, self.team, cfg)
        commands: dict[str, Command] = {}
        says: list[TeamMessage] = []
        said: set[str] = set()

        self._apply_heard_switches(heard)
        self._update_live(view)
        self._coach(world, says, said)

        situation = self._classify_situation(view)
        formation = self.formation_for(situation)

        if world.cycle % DPRE_PERIOD == 0:
            self._exchange_roles(view, formation, situation, world.cycle)

        participants: set[str] = set()
        if self.active is not None:
            participants = self._run_setplay(view, heard, world.cycle, commands, says, said)
        elif (
            self.setplays_enabled
            and view.restart_team == "L"
            and view.play_mode in PlayMode.RESTARTS
        ):
            started = self._try_start_setplay(view, world.cycle)
            if started:
                participants = self._run_setplay(view, heard, world.cycle, commands, says, said)

        self._ball_play(view, participants, commands, says, said)
        self._strategic_movement(view, formation, situation, participants, commands)

        out = [unmirror_command(c, mirror) for aid, c in sorted(commands.items())]
        return out, says

    # -- coach and comms ----------------------------------------------------

    def _apply_heard_switches(self, heard: dict[str, TeamMessage]) -> None:
        for aid, msg in heard.items():
            if aid[0] != self.team or msg is None:
                continue
            if msg.kind == "tacticSwitch" and msg.sender[0] == self.team:
                idx = parse_body(msg)["tactic_index"]
                self.tactic_name = self.strategy.tactic_by_index(idx)

    def _update_live(self, view: WorldView) -> None:
        if view.ball_owner:
            self.live.on_control("L" if view.ball_owner[0] == self.team else "R")

    def _coach(self, world: WorldState, says: list[TeamMessage], said: set[str]) -> None:
        msg = coach_tick(
            self.live,
            self.strategy,
            self.tactic_name,
            world.cycle,
            self.total_cycles,
            self.coach_state,
            team="L",  # live stats are kept in team frame
        )
        if msg is None:
            return
        # The coach speaks through the captain; switch applies team-wide at
        # the next decision (coach advice is followed, not negotiated).
        captain = f"{self.team}1"
        msg = TeamMessage(sender=captain, cycle=msg.cycle, kind=msg.kind, payload=msg.payload)
        says.append(msg)
        said.add(captain)
        self.tactic_name = self.strategy.tactic_by_index(parse_body(msg)["tactic_index"])
        self.events.append(("tactic", self.team, self.tactic_name))

    # -- situation and movement ---------------------------------------------

    def _classify_situation(self, view: WorldView) -> str:
        if view.play_mode == PlayMode.GOAL_KICK and view.restart_team == "L":
            return "goalie-free-kick"
        ours = bool(view.ball_owner) and view.ball_owner[0] == self.team
        if ours and view.ball_pos[0] > 9.0:
            return "scoring-opportunity"
        if ours or view.ball_pos[0] > 3.0:
            return "attack"
        if view.ball_owner and view.ball_owner[0] != self.team:
            return "defence"
        return "default"

    def _all_targets(self, view: WorldView, formation: Formation, situation: str) -> list:
        """All 11 SBSP targets from one map query (one locate per decision)."""
        query = (
            view.ball_pos[0] + 0.5 * view.ball_vel[0],
            view.ball_pos[1] + 0.5 * view.ball_vel[1],
        )
        raw = formation.map_for(situation).interpolate(query)
        hx, hy = view.field
        out = []
        for idx, target in enumerate(raw, start=1):
            t = formation.positioning(idx).clamp(target)
            out.append((min(max(t[0], -hx), hx), min(max(t[1], -hy), hy)))
        return out

    def _exchange_roles(self, view: WorldView, formation: Formation, situation: str, cycle: int) -> None:
        positions = {}
        for num in range(1, 12):
            aid = f"{self.team}{num}"
            positions[num] = view.teammates.get(aid) or (0.0, 0.0)
        targets = self._all_targets(view, formation, situation)
        self.assignment = dpre_assignment(
            self.assignment, positions, targets, formation.positionings, cycle
        )

    def _strategic_movement(
        self,
        view: WorldView,
        formation: Formation,
        situation: str,
        skip: set[str],
        commands: dict[str, Command],
    ) -> None:
        press_radius = PRESS_BASE + 4.0 * self.tactic.mentality
        presser = self._nearest_to_ball(view, exclude_goalie=True)
        targets = self._all_targets(view, formation, situation)
        for idx in range(1, 12):
            num = self.assignment.player_for(idx)
            aid = f"{self.team}{num}"
            if aid in skip or aid in commands or aid not in view.teammates:
                continue
            pos = view.teammates[aid]
            heading = view.headings.get(aid, 0.0)
            if idx == 1:
                target = self._goalie_target(view)
                commands[aid] = move_command(aid, pos, heading, target, urgency=0.6)
                continue
            ball_dist = math.hypot(pos[0] - view.ball_pos[0], pos[1] - view.ball_pos[1])
            opponent_ball = view.ball_owner and view.ball_owner[0] != self.team
            if aid == presser and (opponent_ball or not view.ball_owner) and ball_dist <= press_radius:
                # Stop at tackle distance: inside kickable range, outside the
                # disc-overlap band that draws pushing fouls.
                commands[aid] = move_command(
                    aid, pos, heading, view.ball_pos, urgency=0.9, arrive_radius=0.45
                )
                continue
            commands[aid] = move_command(
                aid, pos, heading, targets[idx - 1], urgency=0.4 + 0.4 * self.tactic.pace
            )

    def _goalie_target(self, view: WorldView):
        y = max(-1.0, min(1.0, view.ball_pos[1] * 0.25))
        return (-view.field[0] + 0.8, y)

    def _nearest_to_ball(self, view: WorldView, exclude_goalie: bool) -> str:
        goalie = f"{self.team}{self.assignment.player_for(1)}"
        best, best_d = "", math.inf
        for aid, pos in view.teammates.items():
            if exclude_goalie and aid == goalie:
                continue
            d = math.hypot(pos[0] - view.ball_pos[0], pos[1] - view.ball_pos[1])
            if d < best_d:
                best, best_d = aid, d
        return best

    # -- ball play ------------------------------------------------------------

    def _ball_play(
        self,
        view: WorldView,
        participants: set[str],
        commands: dict[str, Command],
        says: list[TeamMessage],
        said: set[str],
    ) -> None:
        our_restart = view.restart_team == "L" and view.play_mode in PlayMode.RESTARTS
        owner = view.ball_owner if view.ball_owner and view.ball_owner[0] == self.team else ""
        if owner and view.ball_speed > CONTROLLABLE_BALL_SPEED:
            owner = ""  # the ball is in flight: track it, do not kick at it

        if owner and owner not in participants and owner not in commands:
            candidates = generate_candidates(view, owner, self.tactic)
            if our_restart:
                candidates = [c for c in candidates if c.kind in ("pass", "shoot", "clear")]
            elif self.hold_streak >= 8 and len(candidates) > 1:
                # Stall breaker: holding is safe but sterile; after ~1.5 s the
                # owner must commit to a productive action.
                candidates = [c for c in candidates if c.kind != "hold"]
            if candidates:
                choice = choose_action(candidates, self.tactic, self.flux_map)
                self.hold_streak = self.hold_streak + 1 if choice.kind == "hold" else 0
                commands[owner] = self._candidate_command(choice, owner, view)
        else:
            self.hold_streak = 0
            if our_restart and not self.active:
                taker = self._nearest_to_ball(
                    view, exclude_goalie=view.play_mode != PlayMode.GOAL_KICK
                )
                if taker and taker not in participants and taker not in commands:
                    pos = view.teammates[taker]
                    commands[taker] = move_command(
                        taker, pos, view.headings.get(taker, 0.0), view.ball_pos, urgency=0.9
                    )

        # Ball chatter: the teammate closest to the ball shares what it sees.
        speaker = self._nearest_to_ball(view, exclude_goalie=False)
        if speaker and speaker not in said:
            says.append(
                TeamMessage(
                    sender=speaker,
                    cycle=view.cycle,
                    kind="ballInfo",
                    payload=body_ball_info(*view.ball_pos, *view.ball_vel),
                )
            )
            said.add(speaker)

    def _candidate_command(self, choice, owner: str, view: WorldView) -> Command:
        pos = view.teammates[owner]
        heading = view.headings.get(owner, 0.0)
        if choice.kind in ("pass", "shoot", "clear"):
            overshoot = {"shoot": SHOT_OVERSHOOT, "clear": 3.0}.get(choice.kind, 0.0)
            return kick_command(owner, view.ball_pos, choice.end,
                                kick_min=self.cfg.kick_min, kick_max=self.cfg.kick_max,
                                overshoot=overshoot)
        if choice.kind == "dribble":
            direction = math.atan2(choice.end[1] - pos[1], choice.end[0] - pos[0])
            return dribble_command(owner, direction)
        return hold_command(owner)

    # -- setplay lifecycle ------------------------------------------------------

    def _context(self, view: WorldView) -> ContextFeatures:
        return ContextFeatures(
            ball_pos=view.ball_pos,
            play_mode=view.play_mode,
            nearest_opponent=view.nearest_opponent_distance(view.ball_pos),
        )

    def _try_start_setplay(self, view: WorldView, cycle: int) -> bool:
        library = {
            sid: ast
            for sid, ast in self.setplay_library.items()
            if not self.tactic.setplay_ids or sid in self.tactic.setplay_ids
        }
        candidates = feasible_setplays(library, view)
        if not candidates:
            return False
        context = self._context(view)
        sid = cbr_select(self.case_base, candidates, context)
        ast = library[sid]
        binding = bind_roles(ast, view)
        if binding is None:
            return False
        executors = {
            agent: ExecutorState(setplay=ast, agent=agent, role=role, role_binding=binding)
            for role, agent in binding.items()
        }
        self.active = ActiveSetplay(
            setplay=ast, binding=binding, executors=executors, context=context, start_cycle=cycle
        )
        lead_agent = binding[ast.lead_role]
        for agent in binding.values():
            if agent != lead_agent:
                self.channel.set_priority(agent, lead_agent)
        self.events.append(("setplay", self.team, sid, "start"))
        return True

    def _run_setplay(
        self,
        view: WorldView,
        heard: dict[str, TeamMessage],
        cycle: int,
        commands: dict[str, Command],
        says: list[TeamMessage],
        said: set[str],
    ) -> set[str]:
        active = self.active
        assert active is not None
        participants = set(active.binding.values())
        for aid in sorted(active.executors):
            if aid not in view.teammates:
                continue  # penalized mid-setplay; the directive simply idles
            state = active.executors[aid]
            state2, msgs, cmds = step_executor(state, view, heard.get(aid), cycle)
            active.executors[aid] = state2
            for m in msgs:
                if m.sender not in said:
                    says.append(m)
                    said.add(m.sender)
            for c in cmds:
                commands.setdefault(c.agent, c)

        lead_state = active.executors[active.binding[active.setplay.lead_role]]
        if lead_state.terminal:
            success = lead_state.phase == "finished"
            self.case_base = record_outcome(
                self.case_base, active.setplay.id, active.context, success, cycle
            )
            self.events.append(
                ("setplay", self.team, active.setplay.id, "finish" if success else "abort")
            )
            for agent in active.binding.values():
                self.channel.set_priority(agent, None)
            self.active = None
            return set()
        return participants

    def drain_events(self) -> list[tuple]:
        out = self.events
        self.events = []
        return out
