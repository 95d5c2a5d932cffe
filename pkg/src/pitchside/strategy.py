"""Strategy configuration, action scoring and the coach.

A tactic blends three action concepts with normalized weights: flux gain
(how much the ball's field value improves from the action's start to its
end), safety (failure consequences) and easiness (execution difficulty).
With weights (1,0,0) the team only shoots toward value; with (0,1,0) it
only keeps the ball.  A strategy is a set of tactics plus ordered switch
rules the coach evaluates against live match statistics.

Models (project decisions, the source names the concepts without formulas):

* safety = logistic(nearest-opponent distance to the action segment, scale
  2 m) x a consequence factor decaying toward 0 as the action's end point
  nears our own goal (a failed pass there risks an own goal).  Hold is
  safety 1 by definition.
* easiness = cos^2(half the reorientation angle between the kicker's
  heading and the required ball direction): kicking back the way you face
  is easy, turning the ball around is hard.
* pace, aggressiveness and mentality shape candidate generation only:
  max pass length, forward bias, and press distance respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import sexpr
from .behaviors import shot_target
from .comms import TeamMessage, body_tactic_switch
from .formation import FluxMap, flux_at
from .geometry import Point, segment_distance, wrap_angle
from .sexpr import FormWalker, ParseError
from .setplay.conditions import WorldView

SAFETY_SCALE = 2.0  # m, logistic scale of the interception proxy
CONSEQUENCE_SCALE = 7.5  # m, own-goal proximity decay of the consequence factor
COACH_COOLDOWN_CYCLES = 1500  # 30 s between coach switches

ACTION_KINDS = ("pass", "dribble", "shoot", "hold", "clear")
_TIE_ORDER = {"pass": 0, "dribble": 1, "shoot": 2, "clear": 3, "hold": 4}


@dataclass(frozen=True)
class ActionCandidate:
    kind: str
    start: Point
    end: Point
    safety: float
    easiness: float
    target_agent: str = ""  # pass recipient, when applicable

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise ValueError(f"unknown action kind {self.kind!r}")
        if not (0.0 <= self.safety <= 1.0 and 0.0 <= self.easiness <= 1.0):
            raise ValueError("safety and easiness must lie in [0, 1]")

    @property
    def distance(self) -> float:
        return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])


@dataclass(frozen=True)
class Tactic:
    name: str
    weights: tuple[float, float, float]  # flux, safety, easiness; sums to 1
    pace: float = 0.5
    aggressiveness: float = 0.5
    mentality: float = 0.5
    formations: dict = field(default_factory=dict)  # situation -> formation name
    setplay_ids: tuple[int, ...] = ()

    def __post_init__(self):
        w = self.weights
        if any(x < 0 for x in w) or sum(w) <= 0:
            raise ValueError(f"weights must be nonnegative with positive sum: {w}")
        total = sum(w)
        object.__setattr__(self, "weights", (w[0] / total, w[1] / total, w[2] / total))
        for knob in ("pace", "aggressiveness", "mentality"):
            v = getattr(self, knob)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{knob} must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class SwitchRule:
    predicate: "Predicate"
    target: str


@dataclass(frozen=True)
class Strategy:
    tactics: dict[str, Tactic]
    initial: str
    switch_rules: tuple[SwitchRule, ...] = ()

    def __post_init__(self):
        if self.initial not in self.tactics:
            raise ValueError(f"initial tactic {self.initial!r} is not defined")
        for rule in self.switch_rules:
            if rule.target not in self.tactics:
                raise ValueError(f"switch rule targets unknown tactic {rule.target!r}")

    def tactic_index(self, name: str) -> int:
        return sorted(self.tactics).index(name)

    def tactic_by_index(self, index: int) -> str:
        return sorted(self.tactics)[index]


# --- action scoring -------------------------------------------------------

def normalized_flux_gain(candidate: ActionCandidate, flux_map: FluxMap) -> float:
    gain = flux_at(flux_map, candidate.end) - flux_at(flux_map, candidate.start)
    span = flux_map.value_range()
    return gain / span if span > 0 else 0.0


def score_action(candidate: ActionCandidate, tactic: Tactic, flux_map: FluxMap) -> float:
    wf, ws, we = tactic.weights
    return (
        wf * normalized_flux_gain(candidate, flux_map)
        + ws * candidate.safety
        + we * candidate.easiness
    )


class NoCandidateError(ValueError):
    pass


def choose_action(candidates: list[ActionCandidate], tactic: Tactic, flux_map: FluxMap) -> ActionCandidate:
    """Argmax of score_action; ties resolve pass < dribble < shoot < clear
    < hold, then shorter action distance."""
    if not candidates:
        raise NoCandidateError("no action candidates")
    return max(
        candidates,
        key=lambda c: (
            score_action(c, tactic, flux_map),
            -_TIE_ORDER[c.kind],
            -c.distance,
        ),
    )


def action_safety(start: Point, end: Point, view: WorldView) -> float:
    """Interception-and-consequence proxy in [0, 1]."""
    if not view.opponents:
        intercept_free = 1.0
    else:
        d = min(segment_distance(o, start, end) for o in view.opponents.values())
        intercept_free = 1.0 / (1.0 + math.exp(-(d - SAFETY_SCALE)))
    ogx, ogy = view.own_goal_center
    d_goal = math.hypot(end[0] - ogx, end[1] - ogy)
    consequence = 1.0 - math.exp(-d_goal / CONSEQUENCE_SCALE)
    return min(1.0, max(0.0, intercept_free * consequence))


def action_easiness(heading: float, start: Point, end: Point) -> float:
    """cos^2 of half the body-to-ball reorientation angle."""
    if end == start:
        return 1.0
    required = math.atan2(end[1] - start[1], end[0] - start[0])
    delta = abs(wrap_angle(required - heading))
    return math.cos(delta / 2.0) ** 2


def goal_opening_angle(start: Point, goal_center: Point, goal_width: float = 2.1) -> float:
    """Angle the goal mouth subtends from ``start`` (radians)."""
    gx, gy = goal_center
    a = math.atan2(gy + goal_width / 2.0 - start[1], gx - start[0])
    b = math.atan2(gy - goal_width / 2.0 - start[1], gx - start[0])
    return abs(wrap_angle(a - b))


def generate_candidates(view: WorldView, me: str, tactic: Tactic) -> list[ActionCandidate]:
    """Action menu for the ball owner, shaped by the tactic's knobs."""
    start = view.ball_pos
    heading = view.headings.get(me, 0.0)
    out: list[ActionCandidate] = []

    max_pass = 7.5 + 5.0 * tactic.pace  # pace stretches the passing game
    for agent, pos in sorted(view.teammates.items()):
        if agent == me:
            continue
        dist = math.hypot(pos[0] - start[0], pos[1] - start[1])
        if dist < 2.0 or dist > max_pass:
            continue
        out.append(
            ActionCandidate(
                kind="pass", start=start, end=pos,
                safety=action_safety(start, pos, view),
                easiness=action_easiness(heading, start, pos),
                target_agent=agent,
            )
        )

    # Dribble probes: straight at goal plus two diagonals; aggressiveness
    # biases how far forward the probe reaches.
    gx, gy = view.goal_center
    goal_dir = math.atan2(gy - start[1], gx - start[0])
    probe = 1.5 + 1.5 * tactic.aggressiveness
    for delta in (0.0, math.radians(30.0), math.radians(-30.0)):
        theta = goal_dir + delta
        end = (start[0] + probe * math.cos(theta), start[1] + probe * math.sin(theta))
        out.append(
            ActionCandidate(
                kind="dribble", start=start, end=end,
                safety=action_safety(start, end, view),
                easiness=action_easiness(heading, start, end),
            )
        )

    # A shot is only on the menu from viable range AND a real opening angle:
    # the mouth subtends under a degree from the corner flag.
    shot_range = 9.0 + 5.0 * tactic.aggressiveness
    if (
        math.hypot(gx - start[0], gy - start[1]) <= shot_range
        and goal_opening_angle(start, (gx, gy)) >= 0.10
    ):
        aim = shot_target(start, (gx, gy), view.opponents)
        out.append(
            ActionCandidate(
                kind="shoot", start=start, end=aim,
                safety=action_safety(start, aim, view),
                easiness=action_easiness(heading, start, aim),
            )
        )

    clear_end = (
        min(view.field[0] - 1.5, start[0] + 10.0),
        0.6 * view.field[1] * (1 if start[1] >= 0 else -1),
    )
    out.append(
        ActionCandidate(
            kind="clear", start=start, end=clear_end,
            safety=action_safety(start, clear_end, view),
            easiness=action_easiness(heading, start, clear_end),
        )
    )
    out.append(ActionCandidate(kind="hold", start=start, end=start, safety=1.0, easiness=1.0))
    return out


# --- switch predicates and the coach --------------------------------------

_PRED_ATOMS = ("score-diff", "time-frac", "possession")
_PRED_OPS = ("<", "<=", ">", ">=", "=")


@dataclass(frozen=True)
class Predicate:
    """Boolean expression over (score-diff, time-frac, possession)."""

    form: object  # parsed S-expression form

    def evaluate(self, score_diff: float, time_frac: float, possession: float) -> bool:
        env = {"score-diff": score_diff, "time-frac": time_frac, "possession": possession}
        return bool(_eval_pred(self.form, env))


def _eval_pred(form, env):
    if form == ["true"] or form == "true":
        return True
    if form == ["false"] or form == "false":
        return False
    if not isinstance(form, list) or not form:
        raise ParseError(f"malformed predicate {form!r}", 1, 1)
    head = form[0]
    if head == "and":
        return all(_eval_pred(f, env) for f in form[1:])
    if head == "or":
        return any(_eval_pred(f, env) for f in form[1:])
    if head == "not":
        return not _eval_pred(form[1], env)
    if head in _PRED_OPS:
        if len(form) != 3:
            raise ParseError(f"comparison takes two operands: {form!r}", 1, 1)
        a, b = (_operand(x, env) for x in form[1:])
        return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b, "=": a == b}[head]
    raise ParseError(f"unknown predicate head {head!r}", 1, 1)


def _operand(x, env):
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str) and x in env:
        return env[x]
    raise ParseError(f"unknown predicate operand {x!r}", 1, 1)


def validate_predicate(form) -> None:
    Predicate(form).evaluate(0.0, 0.0, 0.5)


@dataclass
class CoachState:
    last_switch_cycle: int = -(10**9)


def coach_tick(
    stats,
    strategy: Strategy,
    current_tactic: str,
    cycle: int,
    total_cycles: int,
    coach_state: CoachState,
    *,
    cooldown: int = COACH_COOLDOWN_CYCLES,
    team: str = "L",
) -> TeamMessage | None:
    """First matching switch rule wins; at most one switch per cooldown
    window; never a switch to the current tactic.

    ``stats`` needs score_diff(team) and possession(team) accessors (live
    running stats or a final summary).
    """
    if cycle - coach_state.last_switch_cycle < cooldown:
        return None
    time_frac = cycle / total_cycles if total_cycles else 0.0
    score_diff = stats.score_diff(team)
    possession = stats.possession(team)
    for rule in strategy.switch_rules:
        if rule.target == current_tactic:
            continue
        if rule.predicate.evaluate(score_diff, time_frac, possession):
            coach_state.last_switch_cycle = cycle
            return TeamMessage(
                sender=f"{team}1",  # the coach speaks through the captain slot
                cycle=cycle,
                kind="tacticSwitch",
                payload=body_tactic_switch(strategy.tactic_index(rule.target)),
            )
    return None


# --- strategy file format --------------------------------------------------

def parse_strategy(text: str) -> Strategy:
    """Parse a strategy document; diagnostics name unknown references."""
    form = sexpr.parse_one(text)
    return strategy_from_form(form)


def strategy_from_form(form) -> Strategy:
    w = FormWalker(form, "strategy")
    w.require_head("strategy")
    initial = str(w.keyword("initial"))
    tactics: dict[str, Tactic] = {}
    for tform in w.sublists("tactic"):
        tw = FormWalker(tform, "tactic")
        name = str(tw.keyword("name"))
        weights = tw.keyword("weights")
        if not (isinstance(weights, list) and len(weights) == 3):
            raise ParseError(f"tactic {name}: :weights must be (F S E)", 1, 1)
        formations = {}
        for pair in tw.keyword("formations", default=[]):
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ParseError(f"tactic {name}: bad formation binding {pair!r}", 1, 1)
            formations[str(pair[0])] = str(pair[1])
        setplays = tw.keyword("setplays", default=[])
        tactics[name] = Tactic(
            name=name,
            weights=tuple(float(x) for x in weights),
            pace=float(tw.keyword("pace", default=0.5)),
            aggressiveness=float(tw.keyword("aggr", default=0.5)),
            mentality=float(tw.keyword("mentality", default=0.5)),
            formations=formations,
            setplay_ids=tuple(int(s) for s in setplays),
        )
    rules = []
    for sform in w.sublists("switch"):
        sw = FormWalker(sform, "switch")
        pred_form = sw.keyword("when")
        target = str(sw.keyword("to"))
        if target not in tactics:
            raise ParseError(
                f"switch rule (:when {sexpr.dumps(pred_form)}) targets undefined tactic {target!r}",
                1,
                1,
            )
        validate_predicate(pred_form)
        rules.append(SwitchRule(predicate=Predicate(pred_form), target=target))
    if initial not in tactics:
        raise ParseError(f"initial tactic {initial!r} is not defined", 1, 1)
    return Strategy(tactics=tactics, initial=initial, switch_rules=tuple(rules))


def print_strategy(strategy: Strategy) -> str:
    lines = [f"(strategy :initial {strategy.initial}"]
    for name in sorted(strategy.tactics):
        t = strategy.tactics[name]
        wf, ws, we = (sexpr.fmt_num(x) for x in t.weights)
        formations = " ".join(f"({s} {f})" for s, f in sorted(t.formations.items()))
        setplays = " ".join(str(i) for i in t.setplay_ids)
        lines.append(
            f"  (tactic :name {t.name} :weights ({wf} {ws} {we})"
            f" :pace {sexpr.fmt_num(t.pace)} :aggr {sexpr.fmt_num(t.aggressiveness)}"
            f" :mentality {sexpr.fmt_num(t.mentality)}"
            f" :formations ({formations}) :setplays ({setplays}))"
        )
    for rule in strategy.switch_rules:
        lines.append(f"  (switch :when {sexpr.dumps(rule.predicate.form)} :to {rule.target})")
    return "\n".join(lines) + ")\n"
