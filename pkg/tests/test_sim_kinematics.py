import math

import pytest

from pitchside.sim import Command, ContractViolationError, SimConfig, resolve_skill_command
from pitchside.sim.skills import ENVELOPES, IMPROVED_SPRINT_ENVELOPES, TRANSITION_CYCLES, apply_motion, accept_command
from pitchside.sim.state import AgentState


def agent(mode="stand", speed=0.0, robot_type=1, heading=0.0):
    return AgentState(
        team="L", num=7, x=0.0, y=0.0, heading=heading, speed=speed,
        robot_type=robot_type, mode=mode,
    )


def sprint_from_rest(cycles, robot_type=1):
    cfg = SimConfig()
    a = agent(robot_type=robot_type)
    accept_command(a, Command(agent="L7", kind="move", target_speed=10.0, mode="sprint"), cfg)
    speeds = []
    for _ in range(cycles):
        apply_motion(a, cfg.dt, cfg)
        speeds.append(a.speed)
    return a, speeds


def test_ramp_times_follow_from_speed_pairs():
    # With a linear ramp of length T then cruising, the 10 s average is
    # vmax*(1 - T/20); solving for the published averages gives the ramps.
    assert ENVELOPES["sprint"].accel_ramp == pytest.approx(20 * (1 - 2.48 / 2.62))
    assert ENVELOPES["run"].accel_ramp == pytest.approx(20 * (1 - 1.41 / 1.52))
    assert 2.62 * (1 - ENVELOPES["sprint"].accel_ramp / 20) == pytest.approx(2.48)


def test_sprint_average_and_peak_speed():
    a, speeds = sprint_from_rest(500)
    avg = sum(s * 0.02 for s in speeds) / 10.0
    assert avg == pytest.approx(2.48, abs=0.02)
    assert max(speeds) <= 2.62 + 1e-12
    assert a.mode == "sprint"


def test_run_turn_rate_clamped_to_160():
    cfg = SimConfig()
    a = agent(mode="run", speed=1.0)
    out = resolve_skill_command(
        a, Command(agent="L7", kind="move", target_speed=1.0, turn_deg=200.0, mode="run"), 0.02, cfg
    )
    applied = math.degrees(out.heading - a.heading) / 0.02
    assert applied == pytest.approx(160.0)


def test_sprint_turn_rate_is_10():
    cfg = SimConfig()
    a = agent(mode="sprint", speed=2.0)
    out = resolve_skill_command(
        a, Command(agent="L7", kind="move", target_speed=2.0, turn_deg=45.0, mode="sprint"), 0.02, cfg
    )
    assert math.degrees(out.heading - a.heading) / 0.02 == pytest.approx(10.0)


def test_dribble_speed_clamped():
    cfg = SimConfig()
    a = agent(mode="dribble", speed=1.3)
    out = resolve_skill_command(
        a, Command(agent="L7", kind="move", target_speed=2.0, mode="dribble"), 0.02, cfg
    )
    assert out.speed <= 1.3 + 1e-12


def test_unknown_mode_rejected():
    with pytest.raises(ContractViolationError):
        resolve_skill_command(agent(), Command(agent="L7", kind="move", mode="teleport"))


def test_mode_transition_takes_45_cycles():
    cfg = SimConfig()
    a = agent(mode="walk", speed=0.5)
    a.cmd_speed = 0.5
    accept_command(a, Command(agent="L7", kind="move", target_speed=2.0, mode="sprint"), cfg)
    assert a.mode == "transition"
    for i in range(TRANSITION_CYCLES):
        assert a.mode == "transition", f"left transition early at cycle {i}"
        apply_motion(a, cfg.dt, cfg)
    assert a.mode == "sprint"


@pytest.mark.parametrize("warmup", [0, 7, 20, 44])
def test_stop_time_within_envelope_range(warmup):
    cfg = SimConfig()
    a, _ = sprint_from_rest(400 + warmup)  # cruising at vmax, varying gait phase
    accept_command(a, Command(agent="L7", kind="move", target_speed=0.0, mode="stand"), cfg)
    cycles = 0
    while a.speed > 0.0:
        apply_motion(a, cfg.dt, cfg)
        cycles += 1
        assert cycles < 200
    lo, hi = ENVELOPES["sprint"].stop_time
    assert lo - 0.02 <= cycles * cfg.dt <= hi + 0.02
    assert a.mode == "stand"


def test_robot_type_scales_envelope():
    _, speeds_fast = sprint_from_rest(500, robot_type=4)  # scale 1.05
    _, speeds_slow = sprint_from_rest(500, robot_type=5)  # scale 0.95
    assert max(speeds_fast) == pytest.approx(2.62 * 1.05, abs=1e-9)
    assert max(speeds_slow) == pytest.approx(2.62 * 0.95, abs=1e-9)


def test_improved_sprint_preset():
    assert IMPROVED_SPRINT_ENVELOPES["sprint"].max_speed == 3.5
    assert IMPROVED_SPRINT_ENVELOPES["run"] == ENVELOPES["run"]
