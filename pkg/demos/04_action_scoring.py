"""Flux, safety, easiness: how a tactic's weights shape decisions.

Every candidate action is scored w_f * fluxGain + w_s * safety + w_e *
easiness.  Pure flux chasing shoots at value; pure safety keeps the ball;
anything between trades progress against risk.
"""

from pitchside.runner import default_team_setup
from pitchside.setplay import WorldView
from pitchside.strategy import Tactic, choose_action, generate_candidates, score_action

setup = default_team_setup()
flux_map = setup.flux_map

view = WorldView(
    cycle=0, play_mode="play-on", team="L",
    ball_pos=(7.0, 1.0), ball_vel=(0.0, 0.0),
    teammates={"L9": (7.0, 1.0), "L10": (9.0, -4.0), "L8": (3.0, 3.0), "L6": (-1.0, 0.0)},
    opponents={"R1": (14.2, 0.0), "R4": (9.5, 2.0), "R5": (5.0, -2.0)},
    headings={"L9": 0.0}, ball_owner="L9",
)

tactics = {
    "all flux (shoot!)": Tactic(name="f", weights=(1, 0, 0)),
    "all safety (keep it)": Tactic(name="s", weights=(0, 1, 0)),
    "balanced": Tactic(name="b", weights=(0.4, 0.35, 0.25)),
}

candidates = generate_candidates(view, "L9", tactics["balanced"])
print(f"menu for the ball owner at {view.ball_pos}:")
for c in candidates:
    print(f"  {c.kind:<8} -> ({c.end[0]:6.2f},{c.end[1]:6.2f})"
          f"  safety {c.safety:.2f}  easiness {c.easiness:.2f}")

print()
for label, tactic in tactics.items():
    menu = generate_candidates(view, "L9", tactic)
    choice = choose_action(menu, tactic, flux_map)
    print(f"{label:<22} picks {choice.kind:<8}"
          f" (score {score_action(choice, tactic, flux_map):.3f})")

print("\nthe same weights rescaled never change the choice:")
for c in (0.5, 2.0, 10.0):
    tactic = Tactic(name="b2", weights=(0.4 * c, 0.35 * c, 0.25 * c))
    menu = generate_candidates(view, "L9", tactic)
    print(f"  x{c}: {choose_action(menu, tactic, flux_map).kind}")
