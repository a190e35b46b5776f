import numpy as np
import pytest
from scipy.special import j0

from pseudomeasure.core import combine, from_operator_function, from_semigroup, zero_pseudomeasure
from pseudomeasure.cylinder import RingElement, make_cylinder
from pseudomeasure.functionals import (DensityState, check_eq15, convergence_report, cylinder_gaps,
                                       f_state, f_state_eigensum, p_cyl, p_stvw, p_vT,
                                       random_observable, seminorm_V)
from pseudomeasure.grid import BaseSet, StateVector, indicator, make_grid
from pseudomeasure.semigroup import Semigroup, build_generator, make_family, propagate
from pseudomeasure.wiener import bessel_oracle


def unit(g, rng):
    v = rng.standard_normal(g.size) + 1j * rng.standard_normal(g.size)
    sv = StateVector(g, v)
    return StateVector(g, v / sv.norm())


def test_p_cyl(unitary8, rng):
    mu = from_semigroup(unitary8)
    g = unitary8.grid
    assert p_cyl(mu, RingElement.omega(g)) == 1
    assert p_cyl(mu, RingElement.empty(g)) == 0
    c = make_cylinder([0.0, 0.4], [BaseSet.from_cells(g, [1, 2]), BaseSet.from_cells(g, [2, 6])])
    assert abs(p_cyl(combine([2.0], [mu]), c) - 2 * p_cyl(mu, c)) < 1e-15


def test_p_stvw(heat8, unitary8, rng):
    g = heat8.grid
    v = unit(g, rng)
    assert p_stvw(from_semigroup(heat8), 0.0, 1e-6, v, v) == pytest.approx(1.0, abs=1e-4)
    V, W = BaseSet.from_cells(g, [0, 1, 2]), BaseSet.from_cells(g, [2, 5])
    mu = from_semigroup(unitary8)
    c = make_cylinder([0.2, 0.9], [V, W])
    assert abs(p_stvw(mu, 0.2, 0.9, indicator(V), indicator(W)) - abs(mu.eval(c))) < 1e-12
    assert p_stvw(mu, 0.0, 0.5, StateVector.zeros(g), v) == 0
    with pytest.raises(ValueError):
        p_stvw(mu, 0.5, 0.5, v, v)


def test_p_vT(unitary8, rng):
    g = unitary8.grid
    v = unit(g, rng)
    assert abs(p_vT(from_semigroup(unitary8), v, 2.0) - 1.0) < 1e-9
    assert p_vT(zero_pseudomeasure(g), v, 2.0) == 0.0
    with pytest.raises(ValueError):
        p_vT(from_semigroup(unitary8), v, 1.0, time_samples=1)


def test_seminorm_bridge(heat8, unitary8, rng):
    g = heat8.grid
    v = StateVector(g, rng.standard_normal(g.size) + 0j)
    assert check_eq15(heat8, v, 1.3) < 1e-9
    assert check_eq15(unitary8, unit(g, rng), 1.3) < 1e-9
    assert check_eq15(heat8, v, 0.0) < 1e-12
    assert p_vT(from_semigroup(heat8), v, 0.0) == pytest.approx(v.norm(), abs=1e-12)


def test_density_state_validation(rng):
    with pytest.raises(ValueError):
        DensityState(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        DensityState(np.diag([1.5, -0.5]))
    rho = DensityState.random(5, rng, rank=3)
    assert abs(np.trace(rho.matrix) - 1) < 1e-12


def test_f_state_identity_and_eigensum(unitary8, rng):
    mu = from_semigroup(unitary8)
    for _ in range(5):
        t1, t2 = np.sort(rng.uniform(0, 2, 2))
        rho = DensityState.random(8, rng, rank=2)
        assert abs(f_state(mu, rho, np.eye(8), t1, t2) - 1.0) < 1e-10
        obs = random_observable(8, rng)
        pure = DensityState.pure(unit(unitary8.grid, rng))
        assert abs(f_state(mu, pure, obs, t1, t2) - f_state_eigensum(mu, pure, obs, t1, t2)) < 1e-9
    with pytest.raises(ValueError):
        f_state(mu, rho, np.triu(np.ones((8, 8))), 0.0, 1.0)


def test_f_state_homogeneity_and_inequality(unitary8, heat8, rng):
    mu, nu = from_semigroup(unitary8), from_semigroup(heat8)
    for _ in range(50):
        t1, t2 = np.sort(rng.uniform(0, 1, 2))
        rho = DensityState.random(8, rng, rank=int(rng.integers(1, 4)))
        obs = random_observable(8, rng, positive=True)
        alpha = complex(*rng.standard_normal(2))
        assert abs(f_state(combine([alpha], [mu]), rho, obs, t1, t2)
                   - abs(alpha) ** 2 * f_state(mu, rho, obs, t1, t2)) < 1e-9
        lhs = f_state(mu + nu, rho, obs, t1, t2)
        assert lhs <= 2 * (f_state(mu, rho, obs, t1, t2) + f_state(nu, rho, obs, t1, t2)) + 1e-12


def test_seminorm_V(unitary8, rng):
    g = unitary8.grid
    assert seminorm_V(zero_pseudomeasure(g), 10, rng).value == 0
    est = seminorm_V(from_semigroup(unitary8), 20, rng)
    assert abs(est.value - 1.0) < 5e-2 and est.n_probes == 20
    mu = from_semigroup(unitary8)
    a = seminorm_V(mu, 8, np.random.default_rng(3))
    b = seminorm_V(combine([1.5j], [mu]), 8, np.random.default_rng(3))
    assert np.allclose(b.probe_values, 2.25 * np.array(a.probe_values), rtol=1e-9)


def test_convergence_report_constant_family():
    g = make_grid(1, 8, 1.0)
    xi = make_family(g, "regularized_potential", [0.0, 0.0], potential=np.zeros(8))
    ref = Semigroup(build_generator(g, "laplacian"), "unitary")
    rep = convergence_report(xi, ref, 1.0, [indicator(BaseSet.from_cells(g, [0, 1]))], time_samples=8)
    assert max(rep.strong + rep.weak + rep.seminorm) < 1e-10


def test_convergence_report_regularized(tmp_path):
    g = make_grid(1, 64, 1.0)
    xi = make_family(g, "regularized_potential", [0.2, 0.1, 0.05, 0.025])
    ref = make_family(g, "regularized_potential", [0.0]).member(0)
    x = g.coordinates()[:, 0]
    probes = [StateVector(g, np.exp(-0.5 * ((x - 0.5) / 0.1) ** 2) + 0j)]
    rep = convergence_report(xi, ref, 0.1, probes, time_samples=16)
    assert rep.verdict == "strong+seminorm co-converge"
    assert all(b < a for a, b in zip(rep.strong, rep.strong[1:]))
    assert rep.refinement_delta < 1e-3
    rep.write_csv(tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text().count("\n") == 5


def test_bessel_limit_defect_and_cylinder_gaps():
    assert abs(bessel_oracle(1.0) - j0(1.0)) < 1e-12
    g = make_grid(1, 512, 1.0)
    f = lambda t: bessel_oracle(t) * np.eye(g.size)
    nu = from_operator_function(g, f)
    from pseudomeasure.semigroup import semigroup_defect
    assert abs(semigroup_defect(f, 1.0, 1.0) - abs(j0(2) - j0(1) ** 2)) < 1e-10
    V, W, Y = (BaseSet.interval(g, lo, hi) for lo, hi in ((0.05, 0.8), (0.1, 0.9), (0.15, 0.85)))
    sg = make_family(g, "oscillating_multiplier", [32]).member(0)
    two, three = cylinder_gaps(from_semigroup(sg), nu, 1.0, 1.0, V, W, Y)
    # limit three-time gap: |J0(2) - J0(1)^2| * measure(V & W & Y)
    floor = abs(j0(2) - j0(1) ** 2) * 0.65
    assert abs(three - floor) < 2e-2
    assert three > 10 * two
