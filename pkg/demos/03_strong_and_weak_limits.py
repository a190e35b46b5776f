"""Two families: one converging strongly, one only weakly (to J0(t) times identity)."""

import numpy as np
from scipy.special import j0

from pseudomeasure.functionals import convergence_report, cylinder_gaps
from pseudomeasure.core import from_operator_function, from_semigroup
from pseudomeasure.grid import BaseSet, StateVector, indicator, make_grid
from pseudomeasure.semigroup import make_family, semigroup_defect

g = make_grid(1, 128, 1.0)
fam = make_family(g, "regularized_potential", [0.2, 0.1, 0.05, 0.025], mode="unitary")
ref = make_family(g, "regularized_potential", [0.0], mode="unitary").member(0)
x = g.coordinates()[:, 0]
probes = [StateVector(g, np.exp(-0.5 * (x - 0.5) ** 2 / 0.01) + 0j),
          StateVector(g, np.ones(g.size) + 0j)]
rep = convergence_report(fam, ref, 0.1, probes)
print("regularized potential")
for eps, s, p in zip(fam.parameters, rep.strong, rep.seminorm):
    print(f"  eps={eps:<6} strong={s:.5f}  seminorm={p:.5f}")

g = make_grid(1, 512, 1.0)
fam = make_family(g, "oscillating_multiplier", [4, 8, 16, 32])
limit = lambda t: j0(t) * np.eye(g.size)
V, W, Y = (BaseSet.interval(g, a, b) for a, b in ((0.05, 0.8), (0.1, 0.9), (0.15, 0.85)))
rep = convergence_report(fam, limit, 2.0, [indicator(V), indicator(W), indicator(Y)],
                         weak_times=[0.5, 1.0, 2.0])
print("oscillating multiplier")
for n, s, w in zip(fam.parameters, rep.strong, rep.weak):
    print(f"  n={n:<3} strong={s:.3f}  weak gap={w:.4f}")
print("  weak limit defect at t=s=1:", round(semigroup_defect(limit, 1.0, 1.0), 6))
two, three = cylinder_gaps(from_semigroup(fam.member(3)), from_operator_function(g, limit, "J0"),
                           1.0, 1.0, V, W, Y)
print(f"  n=32 cylinder gaps: two-time {two:.4f}  three-time {three:.4f}")
