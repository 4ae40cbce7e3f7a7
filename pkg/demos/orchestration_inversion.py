# Can a handful of small models beat a 400 B frontier model?
#
# In a trust-weighted environment the answer can be yes. The figure-3 config
# pairs the EU environment with a pool of 7, 3 and 2 B models and a calibrated
# orchestration gain eta.

from institutional_scaling import inversion_search, load_figure3

cfg = load_figure3()
env = cfg["environment"]

res = inversion_search(env, cfg["frontier"], cfg["pool"], cfg["max_k"], cfg["eta"], cfg["bits"],
                       min_k=cfg["min_k"])
members = [m.scale for m in res.system.members]
print("system     :", members, "total", res.system.total_scale, "B")
print("F_agent    :", round(res.agent_fitness, 4))
print("F_frontier :", round(res.frontier_fitness, 4))
print("inversion  :", res.verdict)

# Dropping the size floor lets the search choose freely. The 1/sqrt(K)
# dilution makes the two-model system slightly better than all three.

free = inversion_search(env, cfg["frontier"], cfg["pool"], cfg["max_k"], cfg["eta"], cfg["bits"])
print("unrestricted best:", sorted(m.scale for m in free.system.members), round(free.agent_fitness, 4))

# With no orchestration gain the ensemble is scored at its total scale. It
# still wins here because 400 B sits deep in the EU divergence zone.

flat = inversion_search(env, cfg["frontier"], cfg["pool"], cfg["max_k"], 0.0, cfg["bits"])
print("eta = 0    :", round(flat.agent_fitness, 4), "verdict", flat.verdict)
