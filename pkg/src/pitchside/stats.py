"""Event extraction and summary statistics from match logs.

Ball control is attributed to the nearest agent within 0.5 m while the ball
moves slower than 0.5 m/s, or to the last kicker until the next touch.  A
kick whose extrapolated travel crosses the goal mouth is a shot; any other
kick is a pass attempt, completed when the next controller is a teammate,
intercepted when it is an opponent, lost when the ball goes out first.
Possession is the fraction of controlled cycles per team.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .sim.config import SimConfig
from .sim.matchlog import CycleRecord, EventRecord, LogReader

CONTROL_RADIUS = 0.5
CONTROL_BALL_SPEED = 0.5

EVENT_KINDS = (
    "pass",
    "interception",
    "shot",
    "goal",
    "possessionChange",
    "foul",
    "setplayStart",
    "setplayEnd",
)


@dataclass(frozen=True)
class MatchEvent:
    cycle: int
    kind: str
    actors: tuple[str, ...]
    location: tuple[float, float]
    detail: str = ""


@dataclass(frozen=True)
class TeamStats:
    possession_fraction: float
    passes: int
    pass_accuracy: float
    shots: int
    goals: int
    fouls: int
    setplay_success_rate: float


@dataclass(frozen=True)
class MatchStats:
    left: TeamStats
    right: TeamStats
    total_cycles: int

    def team(self, team: str) -> TeamStats:
        return self.left if team == "L" else self.right


def extract_events(log_text: str, cfg: SimConfig | None = None) -> list[MatchEvent]:
    cfg = cfg or SimConfig()
    reader = LogReader(log_text)
    return _extract(reader, cfg)


def _controller(record: CycleRecord) -> str:
    """Agent in control on this cycle by proximity, '' if none."""
    bx, by, bvx, bvy = record.ball
    if math.hypot(bvx, bvy) >= CONTROL_BALL_SPEED:
        # A dribbling carrier keeps control at speed.
        best, best_d = "", CONTROL_RADIUS
        for aid, (x, y, _, _, mode) in record.agents.items():
            if mode != "dribble":
                continue
            d = math.hypot(x - bx, y - by)
            if d < best_d:
                best, best_d = aid, d
        return best
    best, best_d = "", CONTROL_RADIUS
    for aid, (x, y, _, _, _) in sorted(record.agents.items()):
        d = math.hypot(x - bx, y - by)
        if d < best_d:
            best, best_d = aid, d
    return best


def _is_shot(record: CycleRecord, kicker_team: str, cfg: SimConfig) -> bool:
    bx, by, vx, vy = record.ball
    speed = math.hypot(vx, vy)
    if speed <= 0.0:
        return False
    gx = cfg.half_length_x if kicker_team == "L" else -cfg.half_length_x
    if (gx - bx) * vx <= 0.0:
        return False  # moving away from the attacked goal line
    t = (gx - bx) / vx
    y_cross = by + vy * t
    if abs(y_cross) > cfg.goal_width / 2.0:
        return False
    travel = speed * cfg.dt / (1.0 - cfg.ball_decay)  # remaining decay length
    return math.hypot(gx - bx, y_cross - by) <= travel + 1e-9


def _extract(reader: LogReader, cfg: SimConfig) -> list[MatchEvent]:
    events: list[MatchEvent] = []
    by_cycle: dict[int, list[EventRecord]] = {}
    for ev in reader.events:
        by_cycle.setdefault(ev.cycle, []).append(ev)

    possessor = ""  # agent id with control (sticky: last kicker keeps it)
    open_kick: tuple[str, int, bool] | None = None  # kicker, cycle, is_shot

    def ball_pos(record: CycleRecord) -> tuple[float, float]:
        return (record.ball[0], record.ball[1])

    for record in reader.cycles:
        raw = by_cycle.get(record.cycle, [])
        restart = None
        for ev in raw:
            if ev.kind == "kick":
                kicker = ev.fields[0]
                # A pending kick that an opponent kicks away was intercepted.
                if open_kick is not None:
                    prev_kicker, _, was_shot = open_kick
                    if kicker[0] != prev_kicker[0] and not was_shot:
                        events.append(
                            MatchEvent(record.cycle, "interception", (kicker, prev_kicker), ball_pos(record))
                        )
                shot = _is_shot(record, kicker[0], cfg)
                if shot:
                    events.append(MatchEvent(record.cycle, "shot", (kicker,), ball_pos(record)))
                open_kick = (kicker, record.cycle, shot)
                if not possessor or possessor[0] != kicker[0]:
                    events.append(
                        MatchEvent(record.cycle, "possessionChange", (kicker,), ball_pos(record))
                    )
                possessor = kicker
            elif ev.kind == "goal":
                events.append(MatchEvent(record.cycle, "goal", (possessor,), ball_pos(record), detail=ev.fields[0]))
                open_kick = None
            elif ev.kind == "foul":
                events.append(
                    MatchEvent(record.cycle, "foul", (ev.fields[1],), ball_pos(record), detail=ev.fields[0])
                )
            elif ev.kind == "setplay":
                team, sid, phase = ev.fields[0], ev.fields[1], ev.fields[2]
                kind = "setplayStart" if phase == "start" else "setplayEnd"
                events.append(
                    MatchEvent(record.cycle, kind, (team,), ball_pos(record), detail=f"{sid};{phase}")
                )
            elif ev.kind in ("corner", "goal-kick", "free-kick"):
                restart = ev

        if restart is not None and open_kick is not None:
            open_kick = None  # ball went out: kick completed nowhere

        controller = _controller(record)
        if controller:
            if open_kick is not None:
                kicker, kcycle, was_shot = open_kick
                if controller != kicker:
                    if controller[0] == kicker[0]:
                        if not was_shot:
                            events.append(
                                MatchEvent(record.cycle, "pass", (kicker, controller), ball_pos(record))
                            )
                    else:
                        if not was_shot:
                            events.append(
                                MatchEvent(record.cycle, "interception", (controller, kicker), ball_pos(record))
                            )
                    open_kick = None
            if possessor and controller[0] != possessor[0]:
                events.append(
                    MatchEvent(record.cycle, "possessionChange", (controller,), ball_pos(record))
                )
            elif not possessor:
                events.append(
                    MatchEvent(record.cycle, "possessionChange", (controller,), ball_pos(record))
                )
            possessor = controller

    return [e for e in events if e.kind in EVENT_KINDS]


def summarize(events: list[MatchEvent], total_cycles: int) -> MatchStats:
    controlled = {"L": 0, "R": 0}
    changes = [e for e in events if e.kind == "possessionChange"]
    for i, ev in enumerate(changes):
        team = ev.actors[0][0]
        end = changes[i + 1].cycle if i + 1 < len(changes) else total_cycles
        controlled[team] += max(0, end - ev.cycle)
    total_controlled = controlled["L"] + controlled["R"]

    def team_stats(team: str) -> TeamStats:
        my = lambda e: e.actors and e.actors[0][0] == team  # noqa: E731
        passes = sum(1 for e in events if e.kind == "pass" and my(e))
        intercepted = sum(
            1 for e in events if e.kind == "interception" and e.actors[1][0] == team
        )
        shots = sum(1 for e in events if e.kind == "shot" and my(e))
        goals = sum(1 for e in events if e.kind == "goal" and e.detail == team)
        fouls = sum(1 for e in events if e.kind == "foul" and my(e))
        starts = sum(1 for e in events if e.kind == "setplayStart" and e.actors[0] == team)
        finishes = sum(
            1
            for e in events
            if e.kind == "setplayEnd" and e.actors[0] == team and e.detail.endswith("finish")
        )
        attempts = passes + intercepted
        return TeamStats(
            possession_fraction=(controlled[team] / total_controlled) if total_controlled else 0.0,
            passes=passes,
            pass_accuracy=(passes / attempts) if attempts else 0.0,
            shots=shots,
            goals=goals,
            fouls=fouls,
            setplay_success_rate=(finishes / starts) if starts else 0.0,
        )

    return MatchStats(left=team_stats("L"), right=team_stats("R"), total_cycles=total_cycles)


def analyze_log(log_text: str, cfg: SimConfig | None = None) -> tuple[list[MatchEvent], MatchStats]:
    cfg = cfg or SimConfig()
    reader = LogReader(log_text)
    events = _extract(reader, cfg)
    total = reader.cycles[-1].cycle if reader.cycles else 0
    return events, summarize(events, total)


def render_report(stats: MatchStats) -> str:
    """Flat key=value text document."""
    lines = [f"total_cycles={stats.total_cycles}"]
    for team, ts in (("L", stats.left), ("R", stats.right)):
        lines.extend(
            [
                f"{team}.possession={ts.possession_fraction:.4f}",
                f"{team}.passes={ts.passes}",
                f"{team}.pass_accuracy={ts.pass_accuracy:.4f}",
                f"{team}.shots={ts.shots}",
                f"{team}.goals={ts.goals}",
                f"{team}.fouls={ts.fouls}",
                f"{team}.setplay_success_rate={ts.setplay_success_rate:.4f}",
            ]
        )
    return "\n".join(lines) + "\n"


def render_record(stats: MatchStats) -> str:
    """Machine-readable S-expression record for the gateway."""
    def team_form(team, ts):
        return (
            f"({team} :possession {ts.possession_fraction:.4f} :passes {ts.passes}"
            f" :pass-accuracy {ts.pass_accuracy:.4f} :shots {ts.shots} :goals {ts.goals}"
            f" :fouls {ts.fouls} :setplay-success {ts.setplay_success_rate:.4f})"
        )

    return (
        f"(match-stats :cycles {stats.total_cycles}\n"
        f"  {team_form('left', stats.left)}\n"
        f"  {team_form('right', stats.right)})\n"
    )


class LiveStats:
    """Running counters the coach consults mid-match."""

    def __init__(self):
        self.score = {"L": 0, "R": 0}
        self.controlled = {"L": 1, "R": 1}  # Laplace prior keeps ratios sane early

    def on_goal(self, team: str) -> None:
        self.score[team] += 1

    def on_control(self, team: str) -> None:
        self.controlled[team] += 1

    def score_diff(self, team: str) -> int:
        other = "R" if team == "L" else "L"
        return self.score[team] - self.score[other]

    def possession(self, team: str) -> float:
        total = self.controlled["L"] + self.controlled["R"]
        return self.controlled[team] / total
