"""Match and trial orchestration.

A match couples two TeamControllers, one shared say/hear channel and the
simulator into the canonical loop: decide on decision cycles, step the
world every cycle, log every cycle, deliver messages after every step.
Everything downstream of the (config, seed) pair is deterministic, so a
rerun reproduces the log byte for byte.

Trials run one team (with or without setplays) against a lightweight
scripted defense inside a scenario: fixed placements, a play mode, a time
horizon and a success predicate.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import data, sexpr
from .behaviors import kick_command, move_command
from .comms import Channel, ChannelConfig
from .formation import Formation, FluxMap, parse_formation, parse_flux_map
from .sexpr import FormWalker, ParseError
from .setplay import SetplayAst, parse_setplay, setplay_from_form, validate_setplay
from .sim import LogWriter, SimConfig, initial_world, step_world
from .sim.state import Command, CommandSet, PlayMode, WorldState
from .strategy import Strategy, strategy_from_form
from .team import TeamController


@dataclass
class TeamSetup:
    strategy: Strategy
    formations: dict[str, Formation]
    flux_map: FluxMap
    setplays: dict[int, SetplayAst]


def load_setplay_library() -> dict[int, SetplayAst]:
    library: dict[int, SetplayAst] = {}
    for name in data.setplay_names():
        ast = parse_setplay(data.read_setplay(name))
        if validate_setplay(ast):
            raise ValueError(f"packaged setplay {name} does not validate")
        library[ast.id] = ast
    return library


def load_team_setup(text: str) -> TeamSetup:
    """A team document: one (strategy ...), formations, one (flux-map ...)."""
    strategy = None
    formations: dict[str, Formation] = {}
    flux = None
    setplays: dict[int, SetplayAst] = {}
    for form in sexpr.parse(text):
        head = form[0] if isinstance(form, list) and form else None
        if head == "strategy":
            strategy = strategy_from_form(form)
        elif head == "formation":
            f = parse_formation(form)
            formations[f.name] = f
        elif head == "flux-map":
            flux = parse_flux_map(form)
        elif head == "setplay":
            ast = setplay_from_form(form)
            setplays[ast.id] = ast
        else:
            raise ParseError(f"unexpected top-level form ({head} ...)", 1, 1)
    if strategy is None or flux is None or not formations:
        raise ParseError("team document needs (strategy), (formation)+ and (flux-map)", 1, 1)
    library = dict(load_setplay_library())
    library.update(setplays)
    referenced = set()
    for tactic in strategy.tactics.values():
        referenced.update(tactic.setplay_ids)
        for name in tactic.formations.values():
            if name not in formations:
                raise ParseError(f"tactic {tactic.name!r} references unknown formation {name!r}", 1, 1)
    missing = referenced - set(library)
    if missing:
        raise ParseError(f"strategy references unknown setplay ids {sorted(missing)}", 1, 1)
    return TeamSetup(strategy=strategy, formations=formations, flux_map=flux, setplays=library)


def default_team_setup() -> TeamSetup:
    return load_team_setup(data.read_strategy("default"))


@dataclass
class MatchConfig:
    strategy_l: str  # path or 'default'
    strategy_r: str
    seed: int
    halves: int = 2
    half_cycles: int = 15000
    log_path: str = "match.log"
    setplays_l: bool = True
    setplays_r: bool = True

    def sim_config(self) -> SimConfig:
        return SimConfig(halves=self.halves, half_cycles=self.half_cycles)


def parse_match_config(text: str, base_dir: str = ".") -> MatchConfig:
    w = FormWalker(sexpr.parse_one(text), "match")
    w.require_head("match")

    def path(key):
        value = str(w.keyword(key, default="default"))
        if value == "default":
            return value
        resolved = value if os.path.isabs(value) else os.path.join(base_dir, value)
        if not os.path.exists(resolved):
            raise ParseError(f":{key} file not found: {resolved}", 1, 1)
        return resolved

    def flag(key, default):
        value = w.keyword(key, default="true" if default else "false")
        return str(value) == "true"

    return MatchConfig(
        strategy_l=path("strategy-l"),
        strategy_r=path("strategy-r"),
        seed=int(w.keyword("seed", default=0)),
        halves=int(w.keyword("halves", default=2)),
        half_cycles=int(w.keyword("half-cycles", default=15000)),
        log_path=str(w.keyword("log", default="match.log")),
        setplays_l=flag("setplays-l", True),
        setplays_r=flag("setplays-r", True),
    )


def _setup_for(path_or_default: str) -> TeamSetup:
    if path_or_default == "default":
        return default_team_setup()
    with open(path_or_default) as fh:
        return load_team_setup(fh.read())


def _kickoff_world(cfg: SimConfig, setups: dict[str, TeamSetup]) -> WorldState:
    world = initial_world(cfg, play_mode=PlayMode.KICKOFF_LEFT)
    for team, sign in (("L", 1.0), ("R", -1.0)):
        setup = setups[team]
        tactic = setup.strategy.tactics[setup.strategy.initial]
        name = tactic.formations.get("default")
        formation = setup.formations.get(name) or next(iter(setup.formations.values()))
        targets = formation.map_for("default").interpolate((0.0, 0.0))
        for idx, target in enumerate(targets, start=1):
            agent = world.agent(f"{team}{idx}")
            agent.x = sign * target[0]
            agent.y = sign * target[1]
            agent.heading = 0.0 if team == "L" else math.pi
    # Kickoff legality: pull everyone out of the center mark except the taker.
    taker = world.agent("L9")
    taker.x, taker.y = -0.4, 0.0
    return world


class Match:
    def __init__(self, config: MatchConfig):
        self.config = config
        self.cfg = config.sim_config()
        self.setups = {"L": _setup_for(config.strategy_l), "R": _setup_for(config.strategy_r)}
        self.channel = Channel(ChannelConfig())
        self.rng = np.random.default_rng(config.seed)
        total = self.cfg.halves * self.cfg.half_cycles
        self.controllers = {
            "L": TeamController(
                "L", self.setups["L"].strategy, self.setups["L"].formations,
                self.setups["L"].flux_map, self.setups["L"].setplays, self.cfg,
                self.channel, setplays_enabled=config.setplays_l, total_cycles=total,
            ),
            "R": TeamController(
                "R", self.setups["R"].strategy, self.setups["R"].formations,
                self.setups["R"].flux_map, self.setups["R"].setplays, self.cfg,
                self.channel, setplays_enabled=config.setplays_r, total_cycles=total,
            ),
        }
        self.world = _kickoff_world(self.cfg, self.setups)
        self.writer = LogWriter(config.seed, self.cfg.halves, self.cfg.half_cycles)
        self.inbox = {}
        self.progress = 0.0

    def run(self, on_cycle=None) -> str:
        total = self.cfg.halves * self.cfg.half_cycles
        pending_events: list[tuple] = []
        while self.world.cycle < total:
            commands = CommandSet()
            if self.world.cycle % self.cfg.decision_period == 0:
                self.channel.begin_period(self.world.cycle // self.cfg.decision_period)
                for team in ("L", "R"):
                    controller = self.controllers[team]
                    heard = {
                        aid: self.inbox.pop(aid)
                        for aid in list(self.inbox)
                        if aid[0] == team
                    }
                    cmds, says = controller.decide(self.world, heard)
                    for c in cmds:
                        commands.add(c)
                    for m in says:
                        sender = self.world.agent(m.sender)
                        self.channel.enqueue_say(m, (sender.x, sender.y))
                    pending_events.extend(controller.drain_events())
            self.world = step_world(self.world, commands, self.rng, self.cfg)
            if pending_events:
                self.world.cycle_events.extend(pending_events)
                pending_events = []
            for event in self.world.cycle_events:
                if event[0] == "goal":
                    scorer = event[1]
                    for team in ("L", "R"):
                        self.controllers[team].live.on_goal("L" if scorer == team else "R")
            self.writer.append_step(self.world)
            positions = {a.agent_id: a.pos for a in self.world.agents if a.on_pitch}
            self.inbox.update(self.channel.deliver_heard(positions, self.world.cycle, self.rng))
            self.progress = self.world.cycle / total
            if on_cycle is not None:
                on_cycle(self.world)
        self.writer.finish(self.world)
        return self.writer.text()


def run_match(config: MatchConfig, on_cycle=None) -> str:
    """Simulate a full match; writes the log and returns its path."""
    match = Match(config)
    text = match.run(on_cycle=on_cycle)
    with open(config.log_path, "w") as fh:
        fh.write(text)
    return config.log_path


# --- scenarios and trials ----------------------------------------------------

@dataclass
class Scenario:
    name: str
    play_mode: str
    restart_team: str
    ball: tuple[float, float]
    horizon: int
    success: list
    placements: list[tuple[str, tuple[float, float], float]]  # id, pos, heading
    park_l: tuple[float, float, float, float] = (-14.0, -9.7, -4.0, -9.7)
    park_r: tuple[float, float, float, float] = (-14.0, 9.7, -4.0, 9.7)


def parse_scenario(text: str) -> Scenario:
    w = FormWalker(sexpr.parse_one(text), "scenario")
    w.require_head("scenario")
    ball = w.keyword("ball")
    placements = []
    for pform in w.sublists("place"):
        pw = FormWalker(pform, "place")
        pos = pw.keyword("pos")
        placements.append(
            (str(pw.keyword("id")), (float(pos[0]), float(pos[1])), float(pw.keyword("heading", default=0.0)))
        )
    park_l = w.keyword("park-l", default=[-14.0, -9.7, -4.0, -9.7])
    park_r = w.keyword("park-r", default=[-14.0, 9.7, -4.0, 9.7])
    return Scenario(
        name=str(w.keyword("name")),
        play_mode=str(w.keyword("play-mode")),
        restart_team=str(w.keyword("restart-team", default="L")),
        ball=(float(ball[0]), float(ball[1])),
        horizon=int(w.keyword("horizon", default=750)),
        success=w.keyword("success", default=["goal", "L"]),
        placements=placements,
        park_l=tuple(float(x) for x in park_l),
        park_r=tuple(float(x) for x in park_r),
    )


def _scenario_world(scenario: Scenario, cfg: SimConfig) -> WorldState:
    world = initial_world(cfg, play_mode=scenario.play_mode)
    world.ball_x, world.ball_y = scenario.ball
    world.restart_team = scenario.restart_team
    world.restart_countdown = cfg.restart_grace_cycles
    placed = {aid for aid, _, _ in scenario.placements}
    for team, park in (("L", scenario.park_l), ("R", scenario.park_r)):
        unplaced = [a for a in world.agents if a.team == team and a.agent_id not in placed]
        x1, y1, x2, y2 = park
        n = max(len(unplaced) - 1, 1)
        for i, agent in enumerate(unplaced):
            t = i / n
            agent.x = x1 + (x2 - x1) * t
            agent.y = y1 + (y2 - y1) * t
            agent.heading = 0.0
    for aid, (x, y), heading in scenario.placements:
        agent = world.agent(aid)
        agent.x, agent.y = x, y
        agent.heading = heading
    return world


def _scripted_defense(world: WorldState, scenario: Scenario, cfg: SimConfig) -> list[Command]:
    """Local, deterministic defense for the scripted (right) team: the
    goalie shadows the ball on its line, placed defenders press a nearby
    ball and clear it upfield when they win it."""
    commands: list[Command] = []
    placed = {aid for aid, _, _ in scenario.placements if aid.startswith("R")}
    anchors = {aid: pos for aid, pos, _ in scenario.placements if aid.startswith("R")}
    for aid in sorted(placed):
        agent = world.agent(aid)
        if not agent.on_pitch:
            continue
        pos = (agent.x, agent.y)
        ball = (world.ball_x, world.ball_y)
        dist_ball = math.hypot(pos[0] - ball[0], pos[1] - ball[1])
        if agent.has_ball_control:
            commands.append(
                kick_command(aid, ball, (0.0, 5.0 if ball[1] < 0 else -5.0),
                             kick_min=cfg.kick_min, kick_max=cfg.kick_max)
            )
        elif agent.num == 1:
            y = max(-1.0, min(1.0, ball[1] * 0.25))
            target = (cfg.half_length_x - 0.8, y)
            if dist_ball < 2.5:
                target = ball
            commands.append(move_command(aid, pos, agent.heading, target, urgency=0.8))
        elif dist_ball < 3.5:
            commands.append(move_command(aid, pos, agent.heading, ball, urgency=0.9))
        else:
            commands.append(move_command(aid, pos, agent.heading, anchors[aid], urgency=0.5))
    return commands


@dataclass
class ScenarioResult:
    finish_reached: bool
    predicate_holds: bool
    events: list[tuple]
    final_world: WorldState
    log_text: str = ""


def run_scenario(
    scenario: Scenario,
    seed: int,
    *,
    setup: TeamSetup | None = None,
    setplays_enabled: bool = True,
    setplay_library: dict[int, SetplayAst] | None = None,
    keep_log: bool = False,
    cfg: SimConfig | None = None,
) -> ScenarioResult:
    cfg = cfg or SimConfig()
    setup = setup or default_team_setup()
    library = setplay_library if setplay_library is not None else setup.setplays
    channel = Channel(ChannelConfig())
    controller = TeamController(
        "L", setup.strategy, setup.formations, setup.flux_map, library, cfg,
        channel, setplays_enabled=setplays_enabled,
    )
    world = _scenario_world(scenario, cfg)
    rng = np.random.default_rng(seed)
    writer = LogWriter(seed, 1, scenario.horizon) if keep_log else None
    inbox = {}
    events: list[tuple] = []
    allowed = {aid for aid, _, _ in scenario.placements if aid.startswith("L")}
    pending: list[tuple] = []

    for _ in range(scenario.horizon):
        commands = CommandSet()
        if world.cycle % cfg.decision_period == 0:
            channel.begin_period(world.cycle // cfg.decision_period)
            heard = {aid: inbox.pop(aid) for aid in list(inbox) if aid[0] == "L"}
            cmds, says = controller.decide(world, heard)
            for c in cmds:
                if c.agent in allowed:
                    commands.add(c)
            for m in says:
                if m.sender in allowed:
                    sender = world.agent(m.sender)
                    channel.enqueue_say(m, (sender.x, sender.y))
            for c in _scripted_defense(world, scenario, cfg):
                commands.add(c)
            pending.extend(controller.drain_events())
        world = step_world(world, commands, rng, cfg)
        if pending:
            world.cycle_events.extend(pending)
            pending = []
        events.extend(world.cycle_events)
        if writer is not None:
            writer.append_step(world)
        positions = {a.agent_id: a.pos for a in world.agents if a.on_pitch}
        inbox.update(channel.deliver_heard(positions, world.cycle, rng))
        if world.play_mode == PlayMode.GAME_OVER:
            break
        if any(e[0] == "goal" for e in world.cycle_events):
            break

    finish = any(len(e) >= 4 and e[0] == "setplay" and e[3] == "finish" for e in events)
    predicate = _evaluate_success(scenario.success, events, world)
    log_text = ""
    if writer is not None:
        writer.finish(world)
        log_text = writer.text()
    return ScenarioResult(
        finish_reached=finish,
        predicate_holds=predicate,
        events=events,
        final_world=world,
        log_text=log_text,
    )


def _evaluate_success(form, events: list[tuple], world: WorldState) -> bool:
    if not isinstance(form, list) or not form:
        raise ParseError(f"malformed success predicate {form!r}", 1, 1)
    head = form[0]
    if head == "goal":
        team = str(form[1])
        return any(e[0] == "goal" and e[1] == team for e in events)
    if head == "shot":
        team = str(form[1])
        return any(e[0] == "kick" and e[1].startswith(team) for e in events)
    if head == "finish":
        return any(len(e) >= 4 and e[0] == "setplay" and e[3] == "finish" for e in events)
    if head == "and":
        return all(_evaluate_success(f, events, world) for f in form[1:])
    if head == "or":
        return any(_evaluate_success(f, events, world) for f in form[1:])
    raise ParseError(f"unknown success predicate {head!r}", 1, 1)


@dataclass
class TrialReport:
    setplay_id: int
    trials: int
    successes: int
    per_trial_seeds: list[int]
    per_trial_success: list[bool] = field(default_factory=list)

    @property
    def success_rate(self) -> float | None:
        """None when no trials ran (0/0 is undefined, not zero)."""
        if self.trials == 0:
            return None
        return self.successes / self.trials

    def rate_text(self) -> str:
        if self.trials == 0:
            return "0/0 (undefined)"
        return f"{self.successes}/{self.trials} = {self.success_rate:.3f}"

    def render(self) -> str:
        rate = "undefined" if self.success_rate is None else f"{self.success_rate:.4f}"
        seeds = " ".join(str(s) for s in self.per_trial_seeds)
        return (
            f"(trial-report :setplay {self.setplay_id} :trials {self.trials}"
            f" :successes {self.successes} :rate {rate} :seeds ({seeds}))\n"
        )


def trial_seeds(seed: int, n: int) -> list[int]:
    if n == 0:
        return []
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


def run_trials(
    setplay_text: str,
    scenario: Scenario,
    n: int,
    seed: int,
    *,
    setup: TeamSetup | None = None,
    cfg: SimConfig | None = None,
) -> TrialReport:
    """n independent seeded scenario runs of one setplay."""
    ast = parse_setplay(setplay_text)
    diagnostics = validate_setplay(ast)
    if diagnostics:
        raise ParseError(
            "setplay does not validate: " + "; ".join(str(d) for d in diagnostics), 1, 1
        )
    seeds = trial_seeds(seed, n)
    outcomes = []
    for s in seeds:
        result = run_scenario(
            scenario, s, setup=setup, setplays_enabled=True,
            setplay_library={ast.id: ast}, cfg=cfg,
        )
        # A trial succeeds when the setplay ran to finish AND the scenario's
        # success predicate holds.
        outcomes.append(result.finish_reached and result.predicate_holds)
    return TrialReport(
        setplay_id=ast.id,
        trials=n,
        successes=sum(outcomes),
        per_trial_seeds=seeds,
        per_trial_success=outcomes,
    )


def sign_test_p_value(wins: int, losses: int) -> float:
    """One-sided exact sign test: P(X >= wins) for X ~ Binomial(wins+losses, 1/2)."""
    n = wins + losses
    if n == 0:
        return 1.0
    return sum(math.comb(n, k) for k in range(wins, n + 1)) / 2.0**n
