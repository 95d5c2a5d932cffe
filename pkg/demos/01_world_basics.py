"""A tour of the simulated world: cycles, skills, kicks and the referee.

The world advances in 0.02 s cycles; agents may act every third cycle.
This script sprints a robot down the pitch, kicks the ball around with the
calibrated contextual kick, provokes the referee, and writes a small match
log you can inspect by eye.
"""

import math

import numpy as np

from pitchside.sim import (
    Command,
    CommandSet,
    LogWriter,
    SimConfig,
    initial_world,
    sample_kick_outcome,
    step_world,
)

cfg = SimConfig()
rng = np.random.default_rng(7)
world = initial_world(cfg, play_mode="play-on")

print("== sprinting from rest ==")
world.agent("L9").x, world.agent("L9").y = -14.0, -6.0
w = world
for i in range(500):  # 10 s
    cmds = []
    if w.cycle % cfg.decision_period == 0:
        cmds = [Command(agent="L9", kind="move", target_speed=5.0, mode="sprint")]
    w = step_world(w, cmds, rng, cfg)
agent = w.agent("L9")
print(f"after 10 s: speed {agent.speed:.2f} m/s, travelled {agent.x - (-14.0):.1f} m")

print("\n== the contextual kick ==")
for target in (2.5, 8.0, 12.5):
    landings = []
    for _ in range(2000):
        dx, dy = sample_kick_outcome(target, 0.0, rng, cfg)
        landings.append(math.hypot(dx, dy))
    errors = [abs(d - target) for d in landings]
    print(f"target {target:5.1f} m -> mean landing {np.mean(landings):6.2f} m, "
          f"mean |error| {np.mean(errors):.3f} m")

print("\n== the referee dislikes crowds ==")
world = initial_world(cfg, play_mode="play-on")
world.ball_x, world.ball_y = 3.0, 0.0
for i, aid in enumerate(["L5", "L6", "L7", "L8", "L9"]):
    a = world.agent(aid)
    angle = 2 * math.pi * i / 5
    a.x = 3.0 + (0.9 + 0.05 * i) * math.cos(angle)
    a.y = (0.9 + 0.05 * i) * math.sin(angle)
w = step_world(world, CommandSet(), rng, cfg)
fouls = [e for e in w.cycle_events if e[0] == "foul"]
print(f"five teammates around the ball -> rulings: {fouls}")
print(f"penalty queue: {[(p.agent, p.reentry_cycle) for p in w.penalty_queue]}")

print("\n== a logged rally ==")
world = initial_world(cfg, play_mode="play-on")
world.ball_x, world.ball_y = 0.2, 0.0
world.agent("L9").x, world.agent("L9").y = 0.0, 0.0
writer = LogWriter(seed=7, halves=1, half_cycles=200)
w = world
for i in range(200):
    cmds = []
    if w.cycle % cfg.decision_period == 0 and w.agent("L9").has_ball_control:
        cmds = [Command(agent="L9", kind="kick", target_distance=6.0, direction=0.3)]
    w = step_world(w, cmds, rng, cfg)
    writer.append_step(w)
writer.finish(w)
lines = writer.text().splitlines()
print(f"log holds {len(lines)} lines; a cycle record looks like:")
print("  " + lines[3][:110] + "...")
