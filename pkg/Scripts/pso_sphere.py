import numpy as np
from kdmltc import hypertune
from kdmltc.core.pso import sphere

space = hypertune.HyperSpace([("x%d" % i, -5., 5., "continuous") for i in range(4)])
cfg = hypertune.SwarmConfig(n=20, max_iters=50, threshold=0., seed=2, parallelism=1)

res = hypertune.pso_optimize(space, sphere, cfg)
for t in res.trace[::5]:
    print("iteration %2d  best %.3e" % (t["iteration"], t["gbest_score"]))
print("best position", np.round(res.best_position, 4))
