"""Heat-kernel cylinder values next to random-walk Monte Carlo estimates."""

import numpy as np

from pseudomeasure.core import from_semigroup
from pseudomeasure.cylinder import make_cylinder
from pseudomeasure.grid import BaseSet, make_grid
from pseudomeasure.semigroup import Semigroup, build_generator
from pseudomeasure.wiener import estimate_cylinder, z_score

g = make_grid(1, 64, 1.0)
mu = from_semigroup(Semigroup(build_generator(g, "laplacian"), "heat"))

times = [0.1, 0.15, 0.27]
bases = [BaseSet.interval(g, 0.125, 0.5), BaseSet.interval(g, 0.25, 0.75),
         BaseSet.interval(g, 0.0, 0.4375)]
exact = mu.eval(make_cylinder(times, bases, retain_full=True)).real
print(f"propagator chain value  {exact:.6f}")

for n in (10_000, 40_000, 160_000):
    est = estimate_cylinder(g, times, bases, n, seed=1)
    print(f"n_paths={n:>7}  mc={est.value:.6f} +- {est.stderr:.6f}  z={z_score(exact, est):+.2f}")

# the standard error halves when the path count quadruples
print("stderr ratio", np.round(estimate_cylinder(g, times, bases, 160_000, 2).stderr
                              / estimate_cylinder(g, times, bases, 40_000, 3).stderr, 3))
