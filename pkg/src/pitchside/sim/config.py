"""Simulation constants.

Everything here that the source material does not pin down numerically is a
recorded project decision: field geometry, referee thresholds, noise scales
and the ball model.  All of it is overridable per SimConfig instance so
matches, trials and tests can tighten or disable individual effects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SimConfig:
    # Time base: 0.02 s cycles, agents act every 3rd cycle.
    dt: float = 0.02
    decision_period: int = 3

    # Field geometry (meters). Origin at center, x along the length.
    # Left team attacks +x.
    field_length: float = 30.0
    field_width: float = 20.0
    margin: float = 1.0
    goal_width: float = 2.1

    # Agents are discs for crowd/push adjudication.
    agent_radius: float = 0.2

    # Ball: point mass, per-cycle exponential velocity decay, hard stop
    # below ball_stop_speed so kicks come to rest on the pitch.
    ball_decay: float = 0.96
    ball_stop_speed: float = 0.05

    # Kicks: contextual range plus a long-kick sentinel landing beyond 15 m.
    kick_min: float = 2.5
    kick_max: float = 12.5
    long_kick_distance: float = 15.0
    # Radial error is Normal(0, sigma) with sigma chosen so the expected
    # absolute error is 0.34 m: sigma = 0.34 * sqrt(pi/2).
    kick_radial_sigma: float = 0.34 * math.sqrt(math.pi / 2.0)
    kick_angle_sigma_deg: float = 2.0
    long_kick_sigma: float = 1.0
    kickable_radius: float = 0.5

    # Vision cone and observation noise.
    vision_half_angle_deg: float = 60.0
    vision_range: float = 40.0
    distance_noise_frac: float = 0.02
    bearing_noise_deg: float = 0.5

    # Referee thresholds.
    crowding_radius: float = 1.5
    crowding_limit: int = 3
    pushing_speed: float = 0.5
    penalty_cycles: int = 750  # 15 s

    # Restarts: cycles before a restart auto-resumes, and the post-goal pause.
    restart_grace_cycles: int = 100
    goal_pause_cycles: int = 50

    # Match length: 2 halves x 5 min.
    halves: int = 2
    half_cycles: int = 15000

    # Per-robot-type scaling of envelope speeds (types 1..5).
    robot_type_scale: tuple[float, ...] = (1.00, 1.03, 0.97, 1.05, 0.95)

    # Default team lineup by uniform number 1..11 (>=3 distinct types).
    lineup_types: tuple[int, ...] = field(
        default=(1, 3, 3, 3, 1, 4, 4, 4, 2, 2, 2)
    )

    @property
    def half_length_x(self) -> float:
        return self.field_length / 2.0

    @property
    def half_width_y(self) -> float:
        return self.field_width / 2.0

    def type_scale(self, robot_type: int) -> float:
        return self.robot_type_scale[robot_type - 1]

    def in_bounds(self, x: float, y: float) -> bool:
        return abs(x) <= self.half_length_x and abs(y) <= self.half_width_y

    def in_extended_bounds(self, x: float, y: float) -> bool:
        return (
            abs(x) <= self.half_length_x + self.margin
            and abs(y) <= self.half_width_y + self.margin
        )

    def goal_mouth(self, attacking_plus_x: bool) -> tuple[float, float, float]:
        """(x, y_low, y_high) of the goal line being attacked."""
        x = self.half_length_x if attacking_plus_x else -self.half_length_x
        return x, -self.goal_width / 2.0, self.goal_width / 2.0


DEFAULT_CONFIG = SimConfig()
