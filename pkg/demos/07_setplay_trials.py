"""Trial batches: measuring what a setplay is worth.

The trial runner plays one team (with a single setplay armed) against a
scripted defense inside a fixed scenario, across independent seeds.  The
A/B comparison replays the same seeds with setplays disabled and applies an
exact sign test to the paired outcomes.
"""

from pitchside import data
from pitchside.runner import (
    default_team_setup,
    parse_scenario,
    run_scenario,
    run_trials,
    sign_test_p_value,
    trial_seeds,
)

scenario = parse_scenario(data.read_scenario("corner-left"))
setup = default_team_setup()

print("== trial batch: the short corner ==")
report = run_trials(data.read_setplay("corner-short"), scenario, 30, seed=7, setup=setup)
print(f"setplay {report.setplay_id}: {report.rate_text()}")
print(f"first trial seeds: {report.per_trial_seeds[:5]} ... (any trial can be replayed alone)")

print("\n== A/B: the same seeds with and without setplays ==")
n = 60
on = off = wins = losses = 0
for seed in trial_seeds(2024, n):
    a = run_scenario(scenario, seed, setup=setup, setplays_enabled=True).predicate_holds
    b = run_scenario(scenario, seed, setup=setup, setplays_enabled=False).predicate_holds
    on += a
    off += b
    wins += a and not b
    losses += b and not a
p = sign_test_p_value(wins, losses)
print(f"goals with setplays: {on}/{n}, without: {off}/{n}")
print(f"paired wins {wins}, losses {losses}; one-sided sign test p = {p:.3g}")
