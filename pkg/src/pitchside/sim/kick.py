"""Kick outcome model.

A contextual kick takes a target distance in [2.5, 12.5] m and lands at
target + radial error, with the radial error Normal(0, 0.34 * sqrt(pi/2))
so its expected magnitude is 0.34 m.  Direction gets a small additive
Gaussian perturbation.  The long kick (LONG_KICK sentinel) lands at
15 m + |Normal(0, 1)|.
"""

from __future__ import annotations

import math

from .config import SimConfig

LONG_KICK = math.inf


class OutOfContextError(ValueError):
    pass


def sample_kick_outcome(
    target_distance: float,
    direction: float,
    rng,
    cfg: SimConfig | None = None,
    *,
    radial_sigma: float | None = None,
    angle_sigma_deg: float | None = None,
    long_sigma: float | None = None,
) -> tuple[float, float]:
    """Displacement (dx, dy) of the ball landing point relative to the kick.

    Sigma overrides exist so tests and calibrated scenarios can tighten or
    silence individual noise sources.
    """
    cfg = cfg or SimConfig()
    r_sigma = cfg.kick_radial_sigma if radial_sigma is None else radial_sigma
    a_sigma = cfg.kick_angle_sigma_deg if angle_sigma_deg is None else angle_sigma_deg
    l_sigma = cfg.long_kick_sigma if long_sigma is None else long_sigma

    if target_distance == LONG_KICK:
        dist = cfg.long_kick_distance + abs(rng.normal(0.0, l_sigma)) if l_sigma else cfg.long_kick_distance
        theta = direction + (math.radians(a_sigma) * rng.standard_normal() if a_sigma else 0.0)
        return dist * math.cos(theta), dist * math.sin(theta)

    if not (cfg.kick_min <= target_distance <= cfg.kick_max):
        raise OutOfContextError(
            f"kick distance {target_distance} outside [{cfg.kick_min}, {cfg.kick_max}]"
        )
    dist = target_distance + (rng.normal(0.0, r_sigma) if r_sigma else 0.0)
    dist = max(dist, 0.0)
    theta = direction + (math.radians(a_sigma) * rng.standard_normal() if a_sigma else 0.0)
    return dist * math.cos(theta), dist * math.sin(theta)


def launch_speed(distance: float, cfg: SimConfig) -> float:
    """Initial ball speed so exponential decay covers ``distance``.

    With per-cycle retention rho, the travelled distance is the geometric
    sum v0*dt/(1-rho); invert for v0.
    """
    return distance * (1.0 - cfg.ball_decay) / cfg.dt
