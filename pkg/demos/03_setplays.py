"""The setplay language: parse, validate, canonically print, execute.

Setplays are S-expression programs: roles, activation/abort conditions and
steps with directives and alternative transitions.  At run time the lead
walks the step graph and broadcasts step entries; teammates follow the
announcements over the unreliable channel.
"""

from pitchside import data
from pitchside.setplay import parse_setplay, print_setplay, validate_setplay

print("== the corpus ==")
for name in data.setplay_names():
    ast = parse_setplay(data.read_setplay(name))
    print(f"  {ast.id:>2}  {ast.name:<18} {len(ast.steps)} steps, roles: {', '.join(ast.participants)}")

print("\n== a full program ==")
corner = parse_setplay(data.read_setplay("corner-short"))
print(print_setplay(corner))

print("== validation catches broken graphs ==")
broken_source = """
(setplay :name broken :id 99 :players (lead) :abort (false)
  (step :id 0 :wait (0 2) :condition (true)
    :directives ((lead (hold)))
    :transitions ((next :to 7 :cond (true))))
  (step :id 1 :wait (0 2) :condition (true)
    :directives ((ghost (shoot)))
    :transitions ((finish :cond (true)))))
"""
for diagnostic in validate_setplay(parse_setplay(broken_source)):
    print(f"  {diagnostic}")

print("\n== selection learns from outcomes ==")
from pitchside.setplay import CaseBase, ContextFeatures, cbr_select, record_outcome, score

context = ContextFeatures(ball_pos=(14.5, 9.5), play_mode="corner", nearest_opponent=4.0)
base = CaseBase()
print(f"no history: both corners score {score(base, 2, context):.3f}, pick lowest id ->",
      cbr_select(base, [2, 9], context))
for _ in range(6):
    base = record_outcome(base, 9, context, True, cycle=0)
base = record_outcome(base, 2, context, False, cycle=0)
print(f"after 6 far-post successes: short {score(base, 2, context):.3f}"
      f" vs far {score(base, 9, context):.3f} ->", cbr_select(base, [2, 9], context))
