"""Match log: the bit-exact replay and analysis format.

One record per cycle:

    cycle;playMode;SL-SR;ball(x,y,vx,vy);L1(x,y,heading,speed,mode)|...|R11(...)

with every coordinate printed to exactly 3 decimal places.  Event and
ruling records are interleaved, prefixed with ``#EVENT``:

    #EVENT;cycle;kind;field;field;...

The file opens with a ``#MATCH`` header and closes with ``#END;SL-SR``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .state import WorldState
from ..sexpr import fmt_coord


def format_cycle_line(world: WorldState) -> str:
    ball = (
        f"ball({fmt_coord(world.ball_x)},{fmt_coord(world.ball_y)},"
        f"{fmt_coord(world.ball_vx)},{fmt_coord(world.ball_vy)})"
    )
    agents = "|".join(
        f"{a.agent_id}({fmt_coord(a.x)},{fmt_coord(a.y)},{fmt_coord(a.heading)},"
        f"{fmt_coord(a.speed)},{a.mode})"
        for a in world.agents
    )
    return (
        f"{world.cycle};{world.play_mode};{world.score_l}-{world.score_r};{ball};{agents}"
    )


def format_event_line(cycle: int, event: tuple) -> str:
    fields = ";".join(str(f) for f in event)
    return f"#EVENT;{cycle};{fields}"


class LogWriter:
    def __init__(self, seed: int, halves: int, half_cycles: int):
        self.lines: list[str] = [
            f"#MATCH;seed={seed};halves={halves};half_cycles={half_cycles}"
        ]

    def append_step(self, world: WorldState) -> None:
        for event in world.cycle_events:
            self.lines.append(format_event_line(world.cycle, event))
        self.lines.append(format_cycle_line(world))

    def finish(self, world: WorldState) -> None:
        self.lines.append(f"#END;{world.score_l}-{world.score_r}")

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.text())


@dataclass(frozen=True)
class CycleRecord:
    cycle: int
    play_mode: str
    score: tuple[int, int]
    ball: tuple[float, float, float, float]
    agents: dict[str, tuple[float, float, float, float, str]]


@dataclass(frozen=True)
class EventRecord:
    cycle: int
    kind: str
    fields: tuple[str, ...]


class LogParseError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


_AGENT_RE = re.compile(
    r"([LR]\d+)\(([-\d.]+),([-\d.]+),([-\d.]+),([-\d.]+),(\w+)\)"
)
_BALL_RE = re.compile(r"ball\(([-\d.]+),([-\d.]+),([-\d.]+),([-\d.]+)\)")


class LogReader:
    """Parses a match log back into cycle/event records."""

    def __init__(self, text: str):
        self.header: dict[str, int] = {}
        self.footer_score: tuple[int, int] | None = None
        self.cycles: list[CycleRecord] = []
        self.events: list[EventRecord] = []
        self._parse(text)

    def _parse(self, text: str) -> None:
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            if line.startswith("#MATCH;"):
                for part in line.split(";")[1:]:
                    key, _, value = part.partition("=")
                    self.header[key] = int(value)
            elif line.startswith("#EVENT;"):
                parts = line.split(";")
                if len(parts) < 3:
                    raise LogParseError("malformed event record", line_no)
                self.events.append(
                    EventRecord(cycle=int(parts[1]), kind=parts[2], fields=tuple(parts[3:]))
                )
            elif line.startswith("#END;"):
                sl, _, sr = line[len("#END;") :].partition("-")
                self.footer_score = (int(sl), int(sr))
            else:
                self.cycles.append(self._parse_cycle(line, line_no))

    def _parse_cycle(self, line: str, line_no: int) -> CycleRecord:
        parts = line.split(";")
        if len(parts) != 5:
            raise LogParseError(f"expected 5 fields, found {len(parts)}", line_no)
        try:
            cycle = int(parts[0])
            sl, _, sr = parts[2].partition("-")
            ball_m = _BALL_RE.fullmatch(parts[3])
            if ball_m is None:
                raise ValueError("bad ball field")
            agents: dict[str, tuple[float, float, float, float, str]] = {}
            for m in _AGENT_RE.finditer(parts[4]):
                agents[m.group(1)] = (
                    float(m.group(2)),
                    float(m.group(3)),
                    float(m.group(4)),
                    float(m.group(5)),
                    m.group(6),
                )
            if len(agents) != parts[4].count("("):
                raise ValueError("bad agent field")
            return CycleRecord(
                cycle=cycle,
                play_mode=parts[1],
                score=(int(sl), int(sr)),
                ball=tuple(float(g) for g in ball_m.groups()),
                agents=agents,
            )
        except ValueError as exc:
            raise LogParseError(str(exc), line_no) from exc
