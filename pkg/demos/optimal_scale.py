# Where does each deployment environment stop rewarding scale?
#
# Three calibrated environments ship with the package. For each one we sweep
# fitness over 1..400 B parameters, locate the optimum and look at the sign of
# the gradient on either side of it.

import numpy as np

from institutional_scaling import find_optimal_scale, fitness_gradient, load_figure2, sweep_fitness_curve

pack = load_figure2()

# The optimizer brackets the argmax on a log grid, then refines it until the
# gradient is below 1e-8.

for key, (env, target) in pack.items():
    rep = find_optimal_scale(env)
    print(f"{env.name:20s} N* = {rep.n_star:8.2f} B   F(N*) = {rep.fitness_at_star:.4f}"
          f"   target {target['n_star']:.0f} B")

# A coarse text profile of the EU curve. Past the optimum every extra
# parameter costs more trust than it buys in capability.

env, _ = pack["eps2"]
rows = np.array(sweep_fitness_curve(env, (1.0, 400.0, 12)))
for n, f, g in rows:
    bar = "#" * int(round(60 * f))
    print(f"{n:7.1f}  {f:.3f}  {g:+.2e}  {bar}")

n_star = find_optimal_scale(env).n_star
print("slope at N*/2:", fitness_gradient(n_star / 2, 16, env))
print("slope at 2N* :", fitness_gradient(2 * n_star, 16, env))
