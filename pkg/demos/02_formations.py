"""Formations as interpolated maps: Delaunay, SBSP targets and role exchange.

A strategic map is a set of training pairs (ball position -> eleven player
targets).  Queries interpolate barycentrically over the Delaunay
triangulation of the training ball positions, so the whole team slides
smoothly as the ball moves.  Role exchange then lets players swap
positionings whenever the importance-weighted travel cost improves enough.
"""

from pitchside.formation import (
    assignment_cost,
    dpre_assignment,
    identity_assignment,
    sbsp_target,
)
from pitchside.runner import default_team_setup

setup = default_team_setup()
formation = setup.formations["main"]
smap = formation.maps["default"]

print(f"formation {formation.name!r}: {len(smap.pairs)} training pairs,"
      f" {len(smap.triangulation.triangles)} triangles")

print("\n== the striker's SBSP target follows the ball ==")
for ball in [(-12.0, 0.0), (-4.0, 2.0), (4.0, -3.0), (12.0, 0.0)]:
    target = sbsp_target(9, formation, "default", ball, (0.0, 0.0), (15.0, 10.0))
    print(f"ball {ball} -> striker target ({target[0]:6.2f}, {target[1]:6.2f})")

print("\n== ball velocity leads the query by half a second ==")
still = sbsp_target(9, formation, "default", (0.0, 0.0), (0.0, 0.0), (15.0, 10.0))
moving = sbsp_target(9, formation, "default", (0.0, 0.0), (4.0, 0.0), (15.0, 10.0))
print(f"static ball: {still}")
print(f"ball moving +4 m/s in x: {moving}")

print("\n== role exchange repairs a scrambled team ==")
targets = [smap.interpolate((0.0, 0.0))[i] for i in range(11)]
positions = {num: targets[(num % 11)] for num in range(1, 12)}  # everyone shifted one slot
assignment = identity_assignment()
before = assignment_cost(assignment, positions, targets, formation.positionings)
out = dpre_assignment(assignment, positions, targets, formation.positionings, cycle=1000)
after = assignment_cost(out, positions, targets, formation.positionings)
swaps = sum(1 for i in out.mapping if out.mapping[i] != assignment.mapping[i])
print(f"weighted travel cost {before:.1f} -> {after:.1f} after exchanges ({swaps} slots changed)")
print("goalie keeps its slot by policy:", out.mapping[1] == 1)
