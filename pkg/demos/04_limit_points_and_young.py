"""Tail selectors pick out limit points; histograms of oscillating phases average to J0."""

import numpy as np
from scipy.special import j0

from pseudomeasure import averaging as av
from pseudomeasure.grid import make_grid
from pseudomeasure.scenarios import oscillation_field

v = np.array([1.0, -2.0, 0.5])
seq = [(-1) ** k * v for k in range(64)]
E = list(range(64))
sels = [av.make_param_measure(E, "tail_selector", modulus=2, residue=r) for r in (0, 1)]
sels.append(av.make_param_measure(E, "uniform"))
res = av.limit_points(seq, sels)
for name, m, acc in zip(("even tail", "odd tail", "uniform"), res.means, res.is_accumulation):
    print(f"{name:<10} mean={np.round(m, 3)}  accumulation point: {acc}")

g = make_grid(1, 512, 1.0)
fam, field = oscillation_field(g, list(range(1, 513)))
nu = av.make_param_measure(fam.parameters, "uniform")
probes = [(t, 77) for t in (0.5, 1.0, 2.0)]
ym = av.young_measure(field, nu, probes)
for i, (t, _) in enumerate(probes):
    print(f"t={t}: histogram mean {ym.mean(i).real:+.5f}   J0(t) {j0(t):+.5f}")
