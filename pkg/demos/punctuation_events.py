# An affordability shock seen through the entropy of the model population.
#
# The deepseek_moment scenario starts with a market dominated by a 400 B
# model. At step 20 cheap inference makes the 30 B entry competitive and the
# 30 B entry takes over within a step. The entropy collapses, and the
# magnitude of its rate crosses the threshold exactly once.

from institutional_scaling import load_scenario, run_scenario
from institutional_scaling.io import default_fixture_dir

spec = load_scenario(default_fixture_dir() / "deepseek_moment.json")
report = run_scenario(spec)

print("adaptive lambda:", report.lambda_crit)
for ev in report.events:
    print(f"event at step {ev.index}  t = {ev.time}  dH/dt = {ev.rate:.3e}")

# Entropy around the shock, one line per step.
h = report.trajectory.entropies()
for step in range(16, 26):
    print(step, f"{h[step]:.4f}")

# A ten times stricter threshold still isolates the same step.
strict = run_scenario(spec, lambda_crit=10 * report.lambda_crit)
print("strict events:", [ev.index for ev in strict.events])

# Nothing happens in a market without shocks.
quiet = run_scenario(load_scenario(default_fixture_dir() / "stationary.json"))
print("stationary events:", len(quiet.events))
