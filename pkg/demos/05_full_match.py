"""An 11v11 match end to end: simulate, log, replay, analyze.

The match is a pure function of (config, seed): running it twice produces
byte-identical logs.  The statistics module then reconstructs passes,
interceptions, shots and possession from the log alone.
"""

import time

from pitchside.runner import Match, MatchConfig
from pitchside.stats import analyze_log, render_report

config = MatchConfig(
    strategy_l="default", strategy_r="default", seed=2024,
    halves=2, half_cycles=3000,  # a 2-minute scale model of the full match
    log_path="demo_match.log",
)

t0 = time.time()
text = Match(config).run()
print(f"simulated {config.halves}x{config.half_cycles} cycles in {time.time() - t0:.1f} s")

replay = Match(config).run()
print("replay byte-identical:", replay == text)

with open(config.log_path, "w") as fh:
    fh.write(text)

events, stats = analyze_log(text)
print(f"\nextracted {len(events)} events; examples:")
for event in events[:8]:
    print(f"  cycle {event.cycle:>5}  {event.kind:<16} {event.actors}")

print("\n" + render_report(stats))
print(f"full log written to {config.log_path}")
