import numpy as np
import pytest
from scipy.special import j0

from pseudomeasure.core import from_semigroup
from pseudomeasure.cylinder import make_cylinder
from pseudomeasure.grid import BaseSet, lebesgue, make_grid
from pseudomeasure.semigroup import Semigroup, build_generator
from pseudomeasure.wiener import CHUNK, bessel_oracle, estimate_cylinder, z_score

G = make_grid(1, 64, 1.0)
HEAT = from_semigroup(Semigroup(build_generator(G, "laplacian"), "heat"))


def iv(lo, hi):
    return BaseSet.interval(G, lo, hi)


def test_certain_event():
    b1 = iv(0.25, 0.5)
    est = estimate_cylinder(G, [0.0, 0.3], [b1, BaseSet.full(G)], 5000, 1)
    assert est.value == lebesgue(b1) and est.stderr == 0.0
    assert z_score(lebesgue(b1), est) == 0.0


def test_two_time_agreement():
    bases = [iv(0.1875, 0.59375), iv(0.3125, 0.8125)]
    exact = HEAT.eval(make_cylinder([0.0, 0.05], bases, retain_full=True)).real
    est = estimate_cylinder(G, [0.0, 0.05], bases, 100000, 11)
    assert abs(z_score(exact, est)) <= 3


def test_three_time_agreement():
    bases = [iv(0.125, 0.5), iv(0.25, 0.75), iv(0.0, 0.4375)]
    times = [0.1, 0.15, 0.27]
    exact = HEAT.eval(make_cylinder(times, bases, retain_full=True)).real
    # Markov factorization: same value through the reconstructed operators
    mid = HEAT.operator(times, [bases[1]])
    alt = G.cell_volume * np.vdot(bases[2].mask, mid @ bases[0].mask).real
    assert abs(exact - alt) < 1e-12
    est = estimate_cylinder(G, times, bases, 100000, 12)
    assert abs(z_score(exact, est)) <= 3


def test_determinism_and_threads(monkeypatch):
    bases = [iv(0.0, 0.5), iv(0.25, 0.75)]
    a = estimate_cylinder(G, [0.0, 0.1], bases, 3 * CHUNK + 17, 99)
    monkeypatch.setenv("PSEUDOMEASURE_THREADS", "3")
    b = estimate_cylinder(G, [0.0, 0.1], bases, 3 * CHUNK + 17, 99)
    assert (a.value, a.stderr, a.hits) == (b.value, b.stderr, b.hits)


def test_stderr_scaling():
    bases = [iv(0.0, 0.5), iv(0.25, 0.75)]
    a = estimate_cylinder(G, [0.0, 0.1], bases, 10000, 5)
    b = estimate_cylinder(G, [0.0, 0.1], bases, 40000, 6)
    assert abs(b.stderr / a.stderr - 0.5) < 0.1


def test_errors():
    b = iv(0.0, 0.5)
    with pytest.raises(ValueError):
        estimate_cylinder(G, [0.0, 0.1], [BaseSet.empty(G), b], 1000, 0)
    with pytest.raises(ValueError):
        estimate_cylinder(G, [0.1, 0.1], [b, b], 1000, 0)
    with pytest.raises(ValueError):
        estimate_cylinder(G, [0.0, 0.1], [b, b], 999, 0)
    with pytest.raises(ValueError):
        estimate_cylinder(G, [0.0], [b], 1000, 0)


def test_bessel_oracle():
    assert bessel_oracle(0.0) == 1.0
    assert abs(bessel_oracle(1.0) - 0.7651976866) < 1e-6
    assert abs(bessel_oracle(2.0) - 0.2238907791) < 1e-6
    for t in (0.5, 1.0, 2.0, 5.0):
        assert abs(bessel_oracle(t) - j0(t)) < 1e-12
        assert abs(bessel_oracle(t, 256) - bessel_oracle(t)) < 1e-10


def test_report_dict():
    est = estimate_cylinder(G, [0.0, 0.1], [iv(0.0, 0.5), iv(0.25, 0.75)], 1000, 4)
    assert set(est.to_dict()) == {"mc_value", "mc_stderr", "n_paths", "seed"}
