"""Acceptance suite: one test per release criterion, with stated tolerances.

Each test prints a single [PASS]/[FAIL] line (run pytest with -s to see
them).  Runtime-bounded criteria measure their own wall clock.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from pitchside import data
from pitchside.comms import Channel, ChannelConfig, DecodeError, TeamMessage, decode_message
from pitchside.formation import (
    Assignment,
    Positioning,
    assignment_cost,
    dpre_assignment,
    identity_assignment,
)
from pitchside.geometry import build_triangulation, interpolate
from pitchside.runner import (
    Match,
    MatchConfig,
    default_team_setup,
    parse_scenario,
    run_scenario,
    sign_test_p_value,
    trial_seeds,
)
from pitchside.search import (
    ContextualPolicy,
    GaussianSearchState,
    SearchConfig,
    bounded_kl_update,
    kl_gaussian,
    optimize,
    optimize_contextual,
    sample_batch,
)
from pitchside.setplay import parse_setplay, print_setplay, validate_setplay
from pitchside.sim import Command, SimConfig, sample_kick_outcome, step_world
from pitchside.sim.skills import ENVELOPES, TRANSITION_CYCLES, accept_command, apply_motion
from pitchside.sim.state import AgentState
from pitchside.strategy import ActionCandidate, Tactic, choose_action, normalized_flux_gain
from pitchside.formation import FluxMap

from conftest import make_world, place


@contextmanager
def criterion(name):
    try:
        yield
    except Exception:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


# --- kick calibration --------------------------------------------------------

def test_kick_calibration():
    with criterion("kick calibration: E|radial error| in [0.32, 0.36] over 1e5 kicks, <5s"):
        rng = np.random.default_rng(20240401)
        t0 = time.perf_counter()
        targets = rng.uniform(2.5, 12.5, size=100_000)
        total = 0.0
        for t in targets:
            dx, dy = sample_kick_outcome(float(t), 0.0, rng)
            total += abs(math.hypot(dx, dy) - t)
        elapsed = time.perf_counter() - t0
        mean_err = total / len(targets)
        assert 0.32 <= mean_err <= 0.36, mean_err
        assert elapsed < 5.0, f"{elapsed:.2f}s"


# --- sprint kinematics -------------------------------------------------------

def sprint_agent():
    return AgentState(team="L", num=7, x=0.0, y=0.0, heading=0.0, speed=0.0,
                      robot_type=1, mode="stand")


def test_sprint_kinematics():
    with criterion("sprint: avg 2.48+-0.02, peak <=2.62, run turn 160, transition 45 cycles, <1s"):
        t0 = time.perf_counter()
        cfg = SimConfig()
        agent = sprint_agent()
        accept_command(agent, Command(agent="L7", kind="move", target_speed=5.0, mode="sprint"), cfg)
        speeds = []
        transition_cycles = 0
        for _ in range(500):
            if agent.mode == "transition":
                transition_cycles += 1
            apply_motion(agent, cfg.dt, cfg)
            speeds.append(agent.speed)
        avg = sum(s * cfg.dt for s in speeds) / 10.0
        assert abs(avg - 2.48) <= 0.02, avg
        assert max(speeds) <= 2.62 + 1e-12
        assert transition_cycles == TRANSITION_CYCLES

        runner = AgentState(team="L", num=8, x=0.0, y=0.0, heading=0.0, speed=1.0,
                            robot_type=1, mode="run")
        runner.cmd_speed = 1.0
        runner.cmd_turn_deg = 500.0
        h0 = runner.heading
        apply_motion(runner, cfg.dt, cfg)
        assert math.degrees(runner.heading - h0) / cfg.dt == pytest.approx(160.0)
        assert time.perf_counter() - t0 < 1.0


# --- dribble constraint ------------------------------------------------------

def test_dribble_slalom():
    with criterion("dribble: 60s slalom, ball within 0.10m every cycle, speed <=1.3, <2s"):
        t0 = time.perf_counter()
        cfg = SimConfig()
        world = make_world(cfg, ball=(-7.91, -6.0))
        carrier = place(world, "L9", -8.0, -6.0, heading=0.0)
        carrier.robot_type = 1
        rng = np.random.default_rng(99)
        w = world
        attached = False
        for i in range(3000):  # 60 s
            cmds = []
            if w.cycle % cfg.decision_period == 0:
                # Self-centering slalom: 10 s legs east/west along y = -6 with
                # a weave, corrected back toward the corridor center line.
                east = (i // 500) % 2 == 0
                a = w.agent("L9")
                correction = 0.35 * (-6.0 - a.y) + 0.25 * math.sin(i / 40.0)
                correction = max(-0.6, min(0.6, correction))
                direction = math.atan2(correction, 1.0 if east else -1.0)
                cmds = [Command(agent="L9", kind="dribble", direction=direction)]
            w = step_world(w, cmds, rng, cfg)
            a = w.agent("L9")
            assert a.speed <= 1.3 + 1e-9, (i, a.speed)
            if w.dribbler == "L9":
                attached = True
            if attached:
                dist = math.hypot(w.ball_x - a.x, w.ball_y - a.y)
                assert dist <= 0.10 + 1e-9, (i, dist)
        assert attached and w.dribbler == "L9"
        assert w.agent("L9").mode == "dribble"
        assert time.perf_counter() - t0 < 2.0


# --- interpolation suite -----------------------------------------------------

def vectorized_circumcircle_ok(tri, slack=1e-9):
    pts = np.asarray(tri.points)
    for t in tri.triangles:
        a, b, c = (pts[i] for i in t)
        d = 2.0 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        aa, bb, cc = (p @ p for p in (a, b, c))
        ux = (aa * (b[1] - c[1]) + bb * (c[1] - a[1]) + cc * (a[1] - b[1])) / d
        uy = (aa * (c[0] - b[0]) + bb * (a[0] - c[0]) + cc * (b[0] - a[0])) / d
        center = np.array([ux, uy])
        r2 = np.sum((a - center) ** 2)
        d2 = np.sum((pts - center) ** 2, axis=1)
        mask = np.ones(len(pts), bool)
        mask[list(t)] = False
        if np.any(d2[mask] < r2 - slack * (1.0 + r2)):
            return False
    return True


def test_interpolation_suite():
    with criterion("interpolation: vertex 1e-9, continuity 1e-4, circumcircle on 100x50 sets"):
        rng = np.random.default_rng(7)
        # Empty-circumcircle property, brute-forced on 100 random 50-point sets.
        for _ in range(100):
            pts = [tuple(p) for p in rng.uniform(-15.0, 15.0, size=(50, 2))]
            tri = build_triangulation(pts)
            assert vectorized_circumcircle_ok(tri)

        # Vertex reproduction and cross-edge continuity on a random field map.
        pts = [tuple(p) for p in rng.uniform(-15.0, 15.0, size=(30, 2))]
        values = list(rng.uniform(0.0, 10.0, size=30))
        tri = build_triangulation(pts)
        for p, v in zip(pts, values):
            assert abs(interpolate(tri, values, p) - v) <= 1e-9
        for t in tri.triangles:
            a, b, c = tri.triangle_points(t)
            for u, v_ in ((a, b), (b, c), (c, a)):
                mid = ((u[0] + v_[0]) / 2, (u[1] + v_[1]) / 2)
                nx, ny = v_[1] - u[1], -(v_[0] - u[0])
                norm = math.hypot(nx, ny)
                p1 = (mid[0] + nx * 1e-6 / norm, mid[1] + ny * 1e-6 / norm)
                p2 = (mid[0] - nx * 1e-6 / norm, mid[1] - ny * 1e-6 / norm)
                assert abs(interpolate(tri, values, p1) - interpolate(tri, values, p2)) <= 1e-4


# --- DPRE suite ----------------------------------------------------------------

def uniform_positionings(importances):
    return [
        Positioning(index=i, player_type="goalie" if i == 1 else "midfielder",
                    importance=importances[i - 1], region=(-15.0, -10.0, 15.0, 10.0))
        for i in range(1, 12)
    ]


def test_dpre_suite():
    with criterion("DPRE: monotone cost on 1e3 instances, 2-opt optimality, brute-force match, bijective"):
        rng = np.random.default_rng(11)
        for trial in range(1000):
            importances = list(rng.uniform(0.5, 3.0, size=11))
            positionings = uniform_positionings(importances)
            positions = {i: tuple(rng.uniform(-15, 15, size=2)) for i in range(1, 12)}
            targets = [tuple(rng.uniform(-15, 15, size=2)) for _ in range(11)]
            a0 = identity_assignment()
            out = dpre_assignment(a0, positions, targets, positionings, cycle=100)
            before = assignment_cost(a0, positions, targets, positionings)
            after = assignment_cost(out, positions, targets, positionings)
            assert after <= before + 1e-9
            assert sorted(out.mapping.values()) == list(range(1, 12))  # bijective
            if trial % 100 == 0:  # 2-opt optimality modulo hysteresis (sampled)
                for a in range(2, 12):
                    for b in range(a + 1, 12):
                        swapped = dict(out.mapping)
                        swapped[a], swapped[b] = swapped[b], swapped[a]
                        cost = assignment_cost(Assignment(mapping=swapped), positions, targets, positionings)
                        assert cost >= after - 0.5 - 1e-9

        # Exact agreement with 3!-permutation brute force on the worked instance.
        import itertools

        importances = [2.0, 1.0, 1.0] + [1.0] * 8
        positionings = uniform_positionings(importances)
        positions = {1: (0.0, 0.0), 2: (4.0, 0.0), 3: (8.0, 0.0)}
        positions.update({i: (100.0 + i, 50.0) for i in range(4, 12)})
        targets = [(8.0, 0.0), (0.0, 0.0), (4.0, 0.0)] + [positions[i] for i in range(4, 12)]
        out = dpre_assignment(identity_assignment(), positions, targets, positionings,
                              cycle=100, exclude=frozenset())
        got = assignment_cost(out, positions, targets, positionings)
        best = min(
            sum(
                positionings[i].importance
                * math.hypot(positions[perm[i]][0] - targets[i][0],
                             positions[perm[i]][1] - targets[i][1])
                for i in range(3)
            )
            for perm in itertools.permutations([1, 2, 3])
        )
        assert got == pytest.approx(best)
        assert (out.mapping[1], out.mapping[2], out.mapping[3]) == (3, 1, 2)


# --- KL trust region -----------------------------------------------------------

def test_kl_search_suite():
    with criterion("KL search: trust region on 1e3 updates, sphere to -1e-6, contextual 2s, <30s"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(5)
        for _ in range(1000):
            d = int(rng.integers(1, 5))
            m = rng.normal(size=(d, d))
            state = GaussianSearchState(mean=rng.normal(size=d), covariance=m @ m.T + 0.3 * np.eye(d))
            samples = sample_batch(state, 12, rng)
            fitn = rng.normal(size=12) * float(rng.uniform(0.1, 30))
            eps = float(rng.uniform(0.02, 1.0))
            out = bounded_kl_update(state, samples, fitn, SearchConfig(epsilon=eps))
            assert kl_gaussian(out, state) <= eps + 1e-6
            assert np.linalg.eigvalsh(out.covariance).min() >= 1e-12 * 0.99

        config = SearchConfig(epsilon=0.5, samples_per_iteration=20, max_iterations=300, seed=42)
        init = GaussianSearchState(mean=np.full(5, 5.0), covariance=np.eye(5))
        result = optimize(lambda x: -float(np.sum(x * x)), init, config)
        assert result.best_fitness >= -1e-6, result.best_fitness

        policy = ContextualPolicy(weight_matrix=np.zeros((3, 1)), covariance=np.eye(1))
        ctx_config = SearchConfig(epsilon=0.5, samples_per_iteration=20, max_iterations=300, seed=17)
        policy, history = optimize_contextual(
            lambda s, x: -float((x[0] - 2.0 * s) ** 2), policy, ctx_config,
            lambda r: float(r.uniform(0.0, 1.0)),
        )
        errs = [abs(policy.mean(float(s))[0] - 2.0 * s) for s in np.linspace(0, 1, 21)]
        assert max(errs) < 0.05, max(errs)
        assert all(r.kl_spent <= 0.5 + 1e-6 for r in history)
        assert time.perf_counter() - t0 < 30.0


# --- setplay language -----------------------------------------------------------

def bfs_reachable(ast):
    ids = {s.id for s in ast.steps}
    seen, queue = set(), [0]
    while queue:
        sid = queue.pop(0)
        if sid in seen or sid not in ids:
            continue
        seen.add(sid)
        for t in ast.step(sid).transitions:
            if t.kind == "next":
                queue.append(t.target)
    return seen


def test_setplay_language_suite():
    with criterion("setplays: corpus fixed point, diagnostics = BFS oracle, golden transcript"):
        corpus = data.setplay_names()
        assert len(corpus) >= 10
        for name in corpus:
            source = data.read_setplay(name)
            ast = parse_setplay(source)
            printed = print_setplay(ast)
            ast2 = parse_setplay(printed)
            assert ast2 == ast
            assert print_setplay(ast2) == printed

        # Mutate each corpus file: retarget one transition to a missing step;
        # the validator must agree with an independent BFS oracle.
        from dataclasses import replace

        for name in corpus:
            ast = parse_setplay(data.read_setplay(name))
            step0 = ast.steps[0]
            broken_transitions = tuple(
                replace(t, target=99) if t.kind == "next" else t for t in step0.transitions
            )
            broken = replace(
                ast, steps=(replace(step0, transitions=broken_transitions),) + ast.steps[1:]
            )
            diagnostics = validate_setplay(broken)
            flagged_unreachable = {
                int(d.message.split()[1]) for d in diagnostics if d.code == "unreachable-step"
            }
            expected = {s.id for s in broken.steps} - bfs_reachable(broken)
            assert flagged_unreachable == expected
            if any(t.kind == "next" for t in step0.transitions):
                assert any(d.code == "dangling-transition" for d in diagnostics)

        # Golden transcript, byte-exact under the fixed seed.
        import test_setplay_executor as sx

        _, transcript, _ = sx.TestScriptedCornerRun().run(seed=2024)
        assert transcript == sx.GOLDEN_TRANSCRIPT


# --- comms ---------------------------------------------------------------------

def test_comms_suite():
    with criterion("comms: <=1 heard over 1e4 cycles, priority 100%, codec fuzz 1e5"):
        rng = np.random.default_rng(3)
        # Phase 1: drop-free, priorities set: strict 100% preference check.
        channel = Channel(ChannelConfig(drop_probability=0.0))
        ids = [f"{t}{n}" for t in "LR" for n in range(1, 12)]
        positions = {aid: (0.0, 0.0) for aid in ids}
        channel.set_priority("L1", "L5")
        channel.set_priority("R2", "R7")
        for period in range(2000):
            channel.begin_period(period)
            for aid in ids:  # 22 chattering agents
                channel.enqueue_say(TeamMessage(sender=aid, cycle=period, kind="custom", payload=b"x"), (0.0, 0.0))
            heard = channel.deliver_heard(positions, period, rng)
            assert set(heard) <= set(ids)
            assert heard["L1"].sender == "L5"
            assert heard["R2"].sender == "R7"

        # Phase 2: lossy channel, 1e4 cycles: the <=1-heard bound (map shape)
        # holds by construction and no listener is double-delivered.
        channel = Channel(ChannelConfig(drop_probability=0.05))
        for period in range(10_000):
            channel.begin_period(period)
            for aid in ids:
                channel.enqueue_say(TeamMessage(sender=aid, cycle=period, kind="custom", payload=b"y"), (0.0, 0.0))
            heard = channel.deliver_heard(positions, period, rng)
            for listener, message in heard.items():
                assert isinstance(message, TeamMessage)
                assert message.sender != listener

        # Codec fuzzing: 1e5 random payloads, nothing but DecodeError allowed.
        for _ in range(100_000):
            blob = bytes(rng.integers(0, 256, size=int(rng.integers(0, 21))))
            try:
                decode_message(blob)
            except DecodeError:
                pass


# --- coordination behavior -------------------------------------------------------

def ramp_flux():
    return FluxMap([
        ((-15.0, -10.0), -15.0), ((-15.0, 10.0), -15.0),
        ((15.0, -10.0), 15.0), ((15.0, 10.0), 15.0),
    ])


def test_coordination_behavior():
    with criterion("weights (1,0,0) pick max flux, (0,1,0) keep the ball: 1e3 decision points"):
        rng = np.random.default_rng(77)
        fmap = ramp_flux()
        flux_only = Tactic(name="flux", weights=(1.0, 0.0, 0.0))
        safety_only = Tactic(name="safe", weights=(0.0, 1.0, 0.0))
        kinds = ["pass", "dribble", "shoot", "clear"]
        for _ in range(1000):
            start = tuple(rng.uniform(-10, 10, size=2))
            candidates = [
                ActionCandidate(
                    kind=kinds[i % 4],
                    start=start,
                    end=tuple(rng.uniform(-14, 14, size=2)),
                    safety=float(rng.uniform(0, 0.95)),
                    easiness=float(rng.uniform(0, 1)),
                )
                for i in range(6)
            ]
            hold = ActionCandidate(kind="hold", start=start, end=start, safety=1.0, easiness=1.0)
            menu = candidates + [hold]

            best_flux = max(menu, key=lambda c: normalized_flux_gain(c, fmap))
            chosen = choose_action(menu, flux_only, fmap)
            assert normalized_flux_gain(chosen, fmap) == pytest.approx(
                normalized_flux_gain(best_flux, fmap)
            )
            assert choose_action(menu, safety_only, fmap) is hold


# --- setplay benefit ---------------------------------------------------------------

def test_setplay_benefit():
    with criterion("setplays on vs off: 200 seeded corners, strictly higher rate, sign test p<0.05"):
        scenario = parse_scenario(data.read_scenario("corner-left"))
        setup = default_team_setup()
        on = off = wins = losses = 0
        for seed in trial_seeds(42, 200):
            a = run_scenario(scenario, seed, setup=setup, setplays_enabled=True).predicate_holds
            b = run_scenario(scenario, seed, setup=setup, setplays_enabled=False).predicate_holds
            on += a
            off += b
            wins += a and not b
            losses += b and not a
        assert on > off, (on, off)
        p = sign_test_p_value(wins, losses)
        print(f"  setplays on {on}/200, off {off}/200, sign test p = {p:.3g}")
        assert p < 0.05


# --- end-to-end determinism ----------------------------------------------------------

def test_full_match_determinism():
    with criterion("full 11v11 match: 30000 cycles < 60 s, byte-identical replay"):
        def play():
            config = MatchConfig(
                strategy_l="default", strategy_r="default", seed=2024,
                halves=2, half_cycles=15000, log_path="unused.log",
            )
            return Match(config).run()

        t0 = time.perf_counter()
        first = play()
        first_time = time.perf_counter() - t0
        assert first_time < 60.0, f"{first_time:.1f}s"
        second = play()
        assert first == second
        lines = first.splitlines()
        assert sum(1 for l in lines if not l.startswith("#")) == 30000
        print(f"  match wall clock {first_time:.1f}s, log {len(lines)} lines")
