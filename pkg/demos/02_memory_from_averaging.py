"""Averaging two phase rotations gives cos t, which forgets the semigroup law."""

import math

from pseudomeasure import averaging as av
from pseudomeasure import core
from pseudomeasure.grid import BaseSet, make_grid
from pseudomeasure.semigroup import make_family

g = make_grid(1, 1, 1.0)
xi = make_family(g, "scalar_pair", [1.0, -1.0])
nu = av.make_param_measure(xi.parameters, "uniform")
times = [k * math.pi / 4 for k in range(9)]
me = av.mean_evolution(xi, nu, times)

for t in times[:5]:
    print(f"t={t:.3f}  mean={me(t)[0, 0].real:+.6f}  cos t={math.cos(t):+.6f}")

half = math.pi / 2
print("defect |A(t+s) - A(t)A(s)| at t=s=pi/2:", av.memory_defect(me, half, half))

members = [core.from_semigroup(sg) for sg in xi.members()]
sample = [core.MarkovSample((0.0, half, math.pi), (BaseSet.full(g),), 1)]
for p, m in zip(xi.parameters, members):
    print(f"member {p:+}: markov residual {core.check_markov(m, sample).max_residual:.1e}")
mean = av.mean_pseudomeasure(members, nu)
print(f"mean pseudomeasure: markov residual {core.check_markov(mean, sample).max_residual:.3f}")
