"""Pseudomeasures on cylinder sets of grid path space, built from one-parameter semigroups."""

from .averaging import (MeanEvolution, ParamMeasure, YoungMeasure, limit_points, make_param_measure,
                        mean_evolution, mean_pseudomeasure, memory_defect, product_measure_eval,
                        young_measure)
from .core import (LinearCombination, MarkovSample, Pseudomeasure, PropertyReport,
                   SesquilinearForm, TablePseudomeasure, UnevaluableError, check_markov,
                   check_stationary, combine, continuity_constant_a, continuity_constant_b,
                   from_operator_function, from_semigroup, reconstruct_operator, sesquilinear_eval,
                   zero_pseudomeasure)
from .cylinder import (CylinderSet, RingElement, complement, difference, disjointify, intersect,
                       make_cylinder, ring_complement, ring_intersect)
from .functionals import (ConvergenceReport, DensityState, convergence_report, f_state, p_cyl,
                          p_stvw, p_vT, seminorm_V)
from .grid import BaseSet, Grid, StateVector, indicator, inner, lebesgue, make_grid, project
from .semigroup import (Generator, RandomSemigroup, Semigroup, build_generator, make_family,
                        propagate, semigroup_defect)
from .wiener import McEstimate, bessel_oracle, estimate_cylinder

__version__ = "0.1.0"
