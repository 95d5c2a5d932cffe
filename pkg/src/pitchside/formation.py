"""Formations, strategic maps, SBSP targets, role exchange and flux maps.

A formation is eleven positionings (player type, importance weight, clamp
region) plus, per game situation, a strategic map: training pairs from ball
position to eleven target positions, interpolated over a Delaunay
triangulation of the training ball positions.  SBSP queries the map at
ball position + 0.5 s of ball velocity.  Role exchange (2-opt swaps on the
importance-weighted travel cost) runs with hysteresis so roles do not
oscillate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import sexpr
from .geometry import (
    Point,
    Triangulation,
    build_triangulation,
    interpolate,
)
from .sexpr import FormWalker, ParseError, fmt_coord

SITUATIONS = ("default", "defence", "attack", "goalie-free-kick", "scoring-opportunity")
PLAYER_TYPES = ("goalie", "defender", "midfielder", "wing", "attacker")

BALL_VELOCITY_LEAD = 0.5  # seconds of ball velocity added to SBSP queries
DPRE_HYSTERESIS = 0.5  # weighted meters a swap must gain to be applied
DPRE_SWAP_COOLDOWN = 30  # cycles between swaps involving the same player


@dataclass(frozen=True)
class Positioning:
    index: int  # 1..11
    player_type: str
    importance: float
    region: tuple[float, float, float, float]  # x1, y1, x2, y2 with x1<=x2, y1<=y2

    def __post_init__(self):
        if not 1 <= self.index <= 11:
            raise ValueError(f"positioning index {self.index} outside 1..11")
        if self.player_type not in PLAYER_TYPES:
            raise ValueError(f"unknown player type {self.player_type!r}")
        if self.importance <= 0:
            raise ValueError("importance must be positive")
        x1, y1, x2, y2 = self.region
        if x1 > x2 or y1 > y2:
            raise ValueError(f"malformed region {self.region}")

    def clamp(self, p: Point) -> Point:
        x1, y1, x2, y2 = self.region
        return (min(max(p[0], x1), x2), min(max(p[1], y1), y2))


class StrategicMap:
    """Ball position -> 11 target positions, Delaunay-interpolated."""

    def __init__(self, pairs: list[tuple[Point, list[Point]]], situation: str = "default"):
        if len(pairs) < 3:
            raise ValueError("a strategic map needs at least 3 training pairs")
        for ball, targets in pairs:
            if len(targets) != 11:
                raise ValueError(f"training pair at {ball} has {len(targets)} targets, not 11")
        self.situation = situation
        self.pairs = [
            (tuple(map(float, ball)), [tuple(map(float, t)) for t in targets])
            for ball, targets in pairs
        ]
        self.triangulation: Triangulation = build_triangulation([b for b, _ in self.pairs])
        # Flattened per-vertex value rows: (x1,y1,...,x11,y11).
        self._rows = [
            tuple(coord for target in targets for coord in target)
            for _, targets in self.pairs
        ]

    def interpolate(self, ball_pos: Point) -> list[Point]:
        row = interpolate(self.triangulation, self._rows, ball_pos)
        return [(row[2 * i], row[2 * i + 1]) for i in range(11)]


def interpolate_formation(smap: StrategicMap, ball_pos: Point) -> list[Point]:
    return smap.interpolate(ball_pos)


@dataclass
class Formation:
    name: str
    positionings: list[Positioning]
    maps: dict[str, StrategicMap]

    def __post_init__(self):
        if len(self.positionings) != 11:
            raise ValueError("a formation needs exactly 11 positionings")
        if sorted(p.index for p in self.positionings) != list(range(1, 12)):
            raise ValueError("positioning indices must cover 1..11")
        if "default" not in self.maps:
            raise ValueError(f"formation {self.name!r} lacks a default strategic map")
        for situation in self.maps:
            if situation not in SITUATIONS:
                raise ValueError(f"unknown situation {situation!r}")
        self._by_index = {p.index: p for p in self.positionings}

    def positioning(self, index: int) -> Positioning:
        return self._by_index[index]

    def map_for(self, situation: str) -> StrategicMap:
        return self.maps.get(situation) or self.maps["default"]


def sbsp_target(
    player_idx: int,
    formation: Formation,
    situation: str,
    ball_pos: Point,
    ball_vel: Point,
    field_bounds: tuple[float, float] | None = None,
    lead: float = BALL_VELOCITY_LEAD,
) -> Point:
    """Strategic target for positioning ``player_idx`` (1..11).

    The query point is the ball position led by ``lead`` seconds of ball
    velocity; the interpolated target is clamped to the positioning's
    region and, when given, to the field.
    """
    if not 1 <= player_idx <= 11:
        raise ValueError(f"player index {player_idx} outside 1..11")
    query = (ball_pos[0] + lead * ball_vel[0], ball_pos[1] + lead * ball_vel[1])
    targets = formation.map_for(situation).interpolate(query)
    target = targets[player_idx - 1]
    target = formation.positioning(player_idx).clamp(target)
    if field_bounds is not None:
        hx, hy = field_bounds
        target = (min(max(target[0], -hx), hx), min(max(target[1], -hy), hy))
    return target


@dataclass(frozen=True)
class Assignment:
    """Bijection positioning index -> player uniform number."""

    mapping: dict[int, int]
    last_swap_cycle: int = -10**9
    swap_cycle_by_player: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        keys = sorted(self.mapping)
        values = sorted(self.mapping.values())
        if keys != sorted(set(keys)) or values != sorted(set(values)):
            raise ValueError("assignment must be a bijection")

    def player_for(self, positioning_index: int) -> int:
        return self.mapping[positioning_index]

    def positioning_for(self, player: int) -> int:
        for idx, num in self.mapping.items():
            if num == player:
                return idx
        raise KeyError(player)


def identity_assignment() -> Assignment:
    return Assignment(mapping={i: i for i in range(1, 12)})


def assignment_cost(
    assignment: Assignment,
    player_positions: dict[int, Point],
    targets: list[Point],
    positionings: list[Positioning],
) -> float:
    by_index = {p.index: p for p in positionings}
    total = 0.0
    for idx, num in assignment.mapping.items():
        px, py = player_positions[num]
        tx, ty = targets[idx - 1]
        total += by_index[idx].importance * math.hypot(px - tx, py - ty)
    return total


def dpre_assignment(
    current: Assignment,
    player_positions: dict[int, Point],
    targets: list[Point],
    positionings: list[Positioning],
    cycle: int,
    *,
    hysteresis: float = DPRE_HYSTERESIS,
    swap_cooldown: int = DPRE_SWAP_COOLDOWN,
    exclude: frozenset[int] = frozenset({1}),
) -> Assignment:
    """Greedy best-improvement 2-opt on the weighted travel cost.

    Repeatedly applies the pairwise positioning swap with the largest cost
    reduction, as long as that reduction exceeds the hysteresis threshold
    and neither player swapped inside the cooldown window.  The goalie
    positioning (index 1) is excluded by default.  Cost never increases.
    """
    if len(targets) != len(current.mapping):
        raise ValueError(
            f"{len(targets)} targets for {len(current.mapping)} assigned positionings"
        )
    missing = [num for num in current.mapping.values() if num not in player_positions]
    if missing:
        raise ValueError(f"no position for players {missing}")

    by_index = {p.index: p for p in positionings}
    mapping = dict(current.mapping)
    history = current.swap_cycle_by_player  # cooldown compares to prior calls only
    pending: dict[int, int] = {}
    last_swap = current.last_swap_cycle

    def leg_cost(idx: int, num: int) -> float:
        px, py = player_positions[num]
        tx, ty = targets[idx - 1]
        return by_index[idx].importance * math.hypot(px - tx, py - ty)

    def cooled(player: int) -> bool:
        return cycle - history.get(player, -10**9) >= swap_cooldown

    indices = [i for i in sorted(mapping) if i not in exclude]
    while True:
        best_gain = hysteresis
        best_pair = None
        for ai, a in enumerate(indices):
            for b in indices[ai + 1 :]:
                pa, pb = mapping[a], mapping[b]
                if not (cooled(pa) and cooled(pb)):
                    continue
                gain = (
                    leg_cost(a, pa)
                    + leg_cost(b, pb)
                    - leg_cost(a, pb)
                    - leg_cost(b, pa)
                )
                if gain > best_gain:
                    best_gain = gain
                    best_pair = (a, b)
        if best_pair is None:
            break
        a, b = best_pair
        mapping[a], mapping[b] = mapping[b], mapping[a]
        pending[mapping[a]] = cycle
        pending[mapping[b]] = cycle
        last_swap = cycle

    return Assignment(
        mapping=mapping,
        last_swap_cycle=last_swap,
        swap_cycle_by_player={**history, **pending},
    )


class FluxMap:
    """Scalar field over the pitch: value of ball presence at each point."""

    def __init__(self, vertices: list[tuple[Point, float]]):
        if len(vertices) < 3:
            raise ValueError("a flux map needs at least 3 vertices")
        for _, value in vertices:
            if not math.isfinite(value):
                raise ValueError("flux values must be finite")
        self.vertices = [((float(p[0]), float(p[1])), float(v)) for p, v in vertices]
        self.triangulation = build_triangulation([p for p, _ in self.vertices])
        self._values = [v for _, v in self.vertices]
        self.min_value = min(self._values)
        self.max_value = max(self._values)

    def value_range(self) -> float:
        return self.max_value - self.min_value


def flux_at(fmap: FluxMap, point: Point) -> float:
    return interpolate(fmap.triangulation, fmap._values, point)


# --- S-expression file formats -------------------------------------------

def parse_strategic_map(form: list) -> StrategicMap:
    w = FormWalker(form, "strategic-map")
    w.require_head("strategic-map")
    situation = w.keyword("situation", default="default")
    if situation not in SITUATIONS:
        raise ParseError(f"unknown situation {situation!r}", 1, 1)
    pairs = []
    for pair_form in w.sublists("pair"):
        pw = FormWalker(pair_form, "pair")
        ball = pw.keyword("ball")
        targets = pw.keyword("targets")
        if not (isinstance(ball, list) and len(ball) == 2):
            raise ParseError("pair :ball must be (x y)", 1, 1)
        if not (isinstance(targets, list) and len(targets) == 11):
            raise ParseError("pair :targets must hold 11 positions", 1, 1)
        pairs.append(((ball[0], ball[1]), [(t[0], t[1]) for t in targets]))
    return StrategicMap(pairs, situation=situation)


def print_strategic_map(smap: StrategicMap, indent: str = "") -> str:
    lines = [f"{indent}(strategic-map :situation {smap.situation}"]
    for ball, targets in smap.pairs:
        tgt = " ".join(f"({fmt_coord(t[0])} {fmt_coord(t[1])})" for t in targets)
        lines.append(
            f"{indent}  (pair :ball ({fmt_coord(ball[0])} {fmt_coord(ball[1])}) :targets ({tgt}))"
        )
    lines[-1] += ")"
    return "\n".join(lines)


def parse_formation(form: list) -> Formation:
    w = FormWalker(form, "formation")
    w.require_head("formation")
    name = str(w.keyword("name"))
    positionings = []
    for pform in w.sublists("positioning"):
        pw = FormWalker(pform, "positioning")
        region = pw.keyword("region")
        positionings.append(
            Positioning(
                index=pw.keyword("index"),
                player_type=str(pw.keyword("type")),
                importance=float(pw.keyword("importance")),
                region=(region[0], region[1], region[2], region[3]),
            )
        )
    maps = {}
    for mform in w.sublists("strategic-map"):
        smap = parse_strategic_map(mform)
        maps[smap.situation] = smap
    return Formation(name=name, positionings=positionings, maps=maps)


def print_formation(formation: Formation) -> str:
    lines = [f"(formation :name {formation.name}"]
    for p in sorted(formation.positionings, key=lambda p: p.index):
        x1, y1, x2, y2 = p.region
        lines.append(
            f"  (positioning :index {p.index} :type {p.player_type}"
            f" :importance {sexpr.fmt_num(p.importance)}"
            f" :region ({fmt_coord(x1)} {fmt_coord(y1)} {fmt_coord(x2)} {fmt_coord(y2)}))"
        )
    for situation in SITUATIONS:
        if situation in formation.maps:
            lines.append(print_strategic_map(formation.maps[situation], indent="  "))
    return "\n".join(lines) + ")\n"


def parse_flux_map(form: list) -> FluxMap:
    w = FormWalker(form, "flux-map")
    w.require_head("flux-map")
    vertices = []
    for vform in w.sublists("vertex"):
        if len(vform) != 3 or not isinstance(vform[1], list) or len(vform[1]) != 2:
            raise ParseError("vertex must be (vertex (x y) value)", 1, 1)
        vertices.append(((vform[1][0], vform[1][1]), float(vform[2])))
    return FluxMap(vertices)


def print_flux_map(fmap: FluxMap) -> str:
    lines = ["(flux-map"]
    for (x, y), v in fmap.vertices:
        lines.append(f"  (vertex ({fmt_coord(x)} {fmt_coord(y)}) {sexpr.fmt_num(v)})")
    return "\n".join(lines) + ")\n"


def load_formation(text: str) -> Formation:
    return parse_formation(sexpr.parse_one(text))


def load_flux_map(text: str) -> FluxMap:
    return parse_flux_map(sexpr.parse_one(text))
