"""World, agent and command state for the 2D soccer world."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field


class PlayMode:
    KICKOFF_LEFT = "kickoff-left"
    KICKOFF_RIGHT = "kickoff-right"
    PLAY_ON = "play-on"
    CORNER = "corner"
    GOAL_KICK = "goal-kick"
    FREE_KICK = "free-kick"
    GOAL_LEFT = "goal-left"
    GOAL_RIGHT = "goal-right"
    GAME_OVER = "game-over"

    ALL = (
        KICKOFF_LEFT,
        KICKOFF_RIGHT,
        PLAY_ON,
        CORNER,
        GOAL_KICK,
        FREE_KICK,
        GOAL_LEFT,
        GOAL_RIGHT,
        GAME_OVER,
    )
    RESTARTS = (KICKOFF_LEFT, KICKOFF_RIGHT, CORNER, GOAL_KICK, FREE_KICK)


LOCOMOTION_MODES = ("stand", "walk", "run", "sprint", "dribble", "transition")


def agent_id(team: str, num: int) -> str:
    return f"{team}{num}"


def all_agent_ids() -> list[str]:
    return [agent_id(t, n) for t in ("L", "R") for n in range(1, 12)]


@dataclass
class AgentState:
    team: str  # 'L' or 'R'
    num: int  # uniform number 1..11
    x: float
    y: float
    heading: float  # radians
    speed: float
    robot_type: int  # 1..5
    mode: str = "stand"
    mode_timer: int = 0  # counts down during transition, up otherwise
    transition_target: str = ""
    transition_from: str = ""
    stop_rate: float = 0.0  # m/s^2 while stopping to stand
    has_ball_control: bool = False
    on_pitch: bool = True
    # Last accepted move command; persists between decision periods.
    cmd_speed: float = 0.0
    cmd_turn_deg: float = 0.0

    @property
    def agent_id(self) -> str:
        return f"{self.team}{self.num}"

    @property
    def pos(self) -> tuple[float, float]:
        return (self.x, self.y)

    def clone(self) -> "AgentState":
        return copy.copy(self)


@dataclass(frozen=True)
class Command:
    """One agent command per decision period.

    kind: 'move' | 'kick' | 'dribble' | 'none'
    move:    target_speed (m/s), turn_deg (deg/s), mode
    kick:    target_distance in [2.5, 12.5] or LONG_KICK, direction (rad)
    dribble: direction (rad)
    """

    agent: str
    kind: str = "none"
    target_speed: float = 0.0
    turn_deg: float = 0.0
    mode: str = "stand"
    target_distance: float = 0.0
    direction: float = 0.0
    say: bytes | None = None


class DuplicateCommandError(ValueError):
    pass


class CommandSet:
    """Per-period command bundle; rejects two commands for one agent."""

    def __init__(self, commands: list[Command] | None = None):
        self._by_agent: dict[str, Command] = {}
        for c in commands or []:
            self.add(c)

    def add(self, command: Command) -> None:
        if command.agent in self._by_agent:
            raise DuplicateCommandError(
                f"duplicate command for agent {command.agent}"
            )
        self._by_agent[command.agent] = command

    def get(self, agent: str) -> Command | None:
        return self._by_agent.get(agent)

    def __len__(self) -> int:
        return len(self._by_agent)

    def __iter__(self):
        return iter(self._by_agent.values())


@dataclass(frozen=True)
class PenaltyRecord:
    agent: str
    reentry_cycle: int
    reentry_side: int  # +1: reenter at y = +half_width, -1: at -half_width


@dataclass(frozen=True)
class SeenObject:
    object_id: str
    distance: float
    bearing: float  # radians, relative to observer heading


@dataclass(frozen=True)
class Observation:
    observer: str
    cycle: int
    seen: tuple[SeenObject, ...]
    heard: object | None
    heading: float
    speed: float
    play_mode: str
    score: tuple[int, int]


@dataclass
class WorldState:
    cycle: int
    ball_x: float
    ball_y: float
    ball_vx: float
    ball_vy: float
    agents: list[AgentState]  # L1..L11 then R1..R11, fixed order
    play_mode: str
    score_l: int = 0
    score_r: int = 0
    penalty_queue: list[PenaltyRecord] = field(default_factory=list)
    restart_team: str = ""  # team taking the current restart, '' in open play
    restart_countdown: int = 0
    last_touch: str = ""  # agent id of last ball toucher
    dribbler: str = ""  # agent id currently carrying the ball, '' if none
    goal_pause: int = 0
    next_kickoff: str = ""
    # Events emitted during the latest step: (kind, *fields) tuples.
    cycle_events: list[tuple] = field(default_factory=list)
    # Positions before the latest integration step, for push adjudication.
    prev_positions: dict[str, tuple[float, float]] = field(default_factory=dict)

    @property
    def ball_pos(self) -> tuple[float, float]:
        return (self.ball_x, self.ball_y)

    @property
    def ball_speed(self) -> float:
        return (self.ball_vx**2 + self.ball_vy**2) ** 0.5

    def agent(self, aid: str) -> AgentState:
        for a in self.agents:
            if a.team == aid[0] and a.num == int(aid[1:]):
                return a
        raise KeyError(aid)

    def team_agents(self, team: str) -> list[AgentState]:
        return [a for a in self.agents if a.team == team]

    def on_pitch_agents(self) -> list[AgentState]:
        return [a for a in self.agents if a.on_pitch]

    def clone(self) -> "WorldState":
        return WorldState(
            cycle=self.cycle,
            ball_x=self.ball_x,
            ball_y=self.ball_y,
            ball_vx=self.ball_vx,
            ball_vy=self.ball_vy,
            agents=[a.clone() for a in self.agents],
            play_mode=self.play_mode,
            score_l=self.score_l,
            score_r=self.score_r,
            penalty_queue=list(self.penalty_queue),
            restart_team=self.restart_team,
            restart_countdown=self.restart_countdown,
            last_touch=self.last_touch,
            dribbler=self.dribbler,
            goal_pause=self.goal_pause,
            next_kickoff=self.next_kickoff,
            cycle_events=[],
            prev_positions={},
        )
