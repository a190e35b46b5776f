import itertools
import warnings

import numpy as np
import pytest
from scipy.linalg import expm

from pseudomeasure.core import (MarkovSample, SesquilinearForm, TablePseudomeasure, UnevaluableError,
                                check_markov, check_stationary, combine, continuity_constant_a,
                                continuity_constant_b, from_operator_function, from_semigroup,
                                random_cylinder, random_markov_samples, reconstruct_operator,
                                sesquilinear_eval, zero_pseudomeasure)
from pseudomeasure.cylinder import (CylinderSet, RingElement, complement, difference, intersect,
                                    make_cylinder, ring_complement)
from pseudomeasure.grid import BaseSet, StateVector, indicator, lebesgue, make_grid
from pseudomeasure.semigroup import Semigroup, build_generator, laplacian_matrix


def chain_oracle(grid, gen_matrix, mode, times, bases):
    """Direct product with scipy expm, independent of the eigen-cache."""
    def u(t):
        return expm(-1j * t * gen_matrix) if mode == "unitary" else expm(t * gen_matrix)
    v = bases[0].mask.astype(complex)
    for j in range(1, len(times)):
        v = u(times[j] - times[j - 1]) @ v
        if j < len(times) - 1:
            v = bases[j].mask * v
    return grid.cell_volume * np.vdot(bases[-1].mask.astype(complex), v)


@pytest.mark.parametrize("mode", ["unitary", "heat"])
def test_eval_matches_product_oracle(mode, rng):
    g = make_grid(1, 10, 1.0)
    pot = rng.uniform(0, 2, g.size)
    sg = Semigroup(build_generator(g, "laplacian_plus_potential", potential=pot), mode)
    mu = from_semigroup(sg)
    a = laplacian_matrix(g) - np.diag(pot)
    for _ in range(10):
        c = random_cylinder(g, rng, int(rng.integers(2, 5)), retain_full=True)
        assert abs(mu.eval(c) - chain_oracle(g, a, mode, c.times, c.bases)) < 1e-10


def test_heat_mass_conservation(heat8):
    mu = from_semigroup(heat8)
    b = BaseSet.from_cells(heat8.grid, [0, 3, 4])
    full = BaseSet.full(heat8.grid)
    for retain in (True, False):
        c = make_cylinder([0.0, 0.6], [b, full], retain_full=retain)
        assert abs(mu.eval(c) - lebesgue(b)) < 1e-9


def test_one_cell_scalar():
    g = make_grid(1, 1, 2.0)
    sg = Semigroup(build_generator(g, "multiplication", multiplier=1.0), "unitary")
    full = BaseSet.full(g)
    c = make_cylinder([0.0, 0.8], [full, full], retain_full=True)
    assert abs(from_semigroup(sg).eval(c) - 2.0 * np.exp(-0.8j)) < 1e-14


def test_eval_empty_omega_and_normalization(unitary8, rng):
    mu = from_semigroup(unitary8)
    g = unitary8.grid
    assert mu.eval(CylinderSet.empty(g)) == 0
    assert mu.eval(RingElement.empty(g)) == 0
    assert mu.eval(RingElement.omega(g)) == 1
    a = random_cylinder(g, rng, 3)
    flagged = ring_complement(RingElement.of(a))
    assert abs(mu.eval(a) + mu.eval(flagged) - 1) < 1e-14


def test_complement_decomposition_total_heat(heat8, rng):
    # the chain evaluation on an explicit partition gives the total Lebesgue mass, not 1
    mu = from_semigroup(heat8)
    a = random_cylinder(heat8.grid, rng, 2, retain_full=True)
    total = mu.eval(a) + mu.eval(complement(a))
    assert abs(total - heat8.grid.extent) < 1e-10


def test_combine(unitary8, heat8, rng):
    mu = from_semigroup(unitary8)
    nu = from_semigroup(heat8)
    c = random_cylinder(unitary8.grid, rng, 3)
    assert combine([1.0], [mu]).eval(c) == mu.eval(c)
    assert abs(combine([1.0, -1.0], [mu, mu]).eval(c)) == 0
    assert abs(combine([0.5, 0.5], [mu, nu]).eval(c) - (mu.eval(c) + nu.eval(c)) / 2) < 1e-15
    assert abs((2 * mu).eval(c) - 2 * mu.eval(c)) < 1e-15
    with pytest.raises(ValueError):
        combine([1.0, 2.0], [mu])


def test_linear_combination_on_complemented(unitary8, heat8, rng):
    mu, nu = from_semigroup(unitary8), from_semigroup(heat8)
    a = RingElement.of(random_cylinder(unitary8.grid, rng, 2))
    flagged = ring_complement(a)
    lc = combine([0.3, 0.7], [mu, nu])
    assert abs(lc.eval(flagged) - (0.3 * mu.eval(flagged) + 0.7 * nu.eval(flagged))) < 1e-14


def test_sesquilinear_examples(unitary8, rng):
    g = unitary8.grid
    mu = from_semigroup(unitary8)
    b0, b1, b2 = (BaseSet.from_cells(g, c) for c in ([0, 1], [2, 3, 4], [1, 5]))
    times = (0.0, 0.3, 0.9)
    form = SesquilinearForm(mu, times, (b1,))
    c = make_cylinder(times, [b0, b1, b2], retain_full=True)
    assert abs(form(indicator(b0), indicator(b2)) - mu.eval(c)) < 1e-12
    zero = StateVector.zeros(g)
    f = StateVector(g, rng.standard_normal(8) + 1j * rng.standard_normal(8))
    h = StateVector(g, rng.standard_normal(8) + 0j)
    assert form(zero, h) == 0 and form(f, zero) == 0
    cc, aa = 2 - 1j, 0.5 + 3j
    scaled = form(StateVector(g, cc * f.values), StateVector(g, aa * h.values))
    assert abs(scaled - cc * np.conj(aa) * form(f, h)) < 1e-12
    with pytest.raises(ValueError):
        sesquilinear_eval(form, f, StateVector.zeros(make_grid(1, 4, 1.0)))


def test_reconstruct_operator_examples(heat8, unitary8):
    mu = from_semigroup(heat8)
    assert np.abs(reconstruct_operator(mu, [0.0, 0.3]) - expm(0.3 * laplacian_matrix(heat8.grid))).max() < 1e-9
    assert np.abs(reconstruct_operator(mu, [0.4, 0.4]) - np.eye(8)).max() < 1e-12
    b = BaseSet.from_cells(heat8.grid, [2, 3, 7])
    got = reconstruct_operator(mu, [0.1, 0.25, 0.6], [b])
    want = heat8(0.35) @ np.diag(b.mask.astype(float)) @ heat8(0.15)
    assert np.abs(got - want).max() < 1e-12


def test_generic_operator_route_matches(unitary8):
    # from_operator_function goes through the same chain; a table of cell evaluations must agree
    mu = from_semigroup(unitary8)
    g = unitary8.grid
    table = TablePseudomeasure(g)
    cells = [BaseSet.from_cells(g, [j]) for j in range(g.size)]
    for j, k in itertools.product(range(g.size), repeat=2):
        c = make_cylinder([0.0, 0.5], [cells[j], cells[k]], retain_full=True)
        table[c] = mu.eval(c)
    assert np.abs(table.operator([0.0, 0.5]) - unitary8(0.5)).max() < 1e-12


def test_table_missing_entry_raises(unitary8):
    g = unitary8.grid
    table = TablePseudomeasure(g)
    with pytest.raises(UnevaluableError):
        table.eval(make_cylinder([0.0, 1.0], [BaseSet.from_cells(g, [0]), BaseSet.from_cells(g, [1])]))


def test_markov_examples(unitary8, rng):
    mu = from_semigroup(unitary8)
    assert check_markov(mu, random_markov_samples(unitary8.grid, rng, 10)).max_residual < 1e-9
    full = BaseSet.full(unitary8.grid)
    assert check_markov(mu, [MarkovSample((0.0, 0.7, 0.7), (full,), 1)]).max_residual < 1e-9
    g1 = make_grid(1, 1, 1.0)
    mix = combine([0.5, 0.5], [
        from_semigroup(Semigroup(build_generator(g1, "multiplication", multiplier=s), "unitary"))
        for s in (1.0, -1.0)])
    f1 = BaseSet.full(g1)
    res = check_markov(mix, [MarkovSample((0.0, np.pi / 2, np.pi), (f1,), 1)]).max_residual
    assert abs(res - 1.0) < 1e-12


def test_stationary_examples(unitary8, rng):
    mu = from_semigroup(unitary8)
    cyls = [random_cylinder(unitary8.grid, rng, 3) for _ in range(10)]
    assert check_stationary(mu, 0.7, cyls).max_residual < 1e-10
    assert check_stationary(mu, 0.0, cyls).max_residual == 0.0
    table = TablePseudomeasure(unitary8.grid)
    c = cyls[0]
    from pseudomeasure.cylinder import shift
    table[c] = mu.eval(c)
    table[shift(c, 0.5)] = mu.eval(c) + 0.25
    assert check_stationary(table, 0.5, [c]).max_residual == pytest.approx(0.25)


def test_continuity_constants(unitary8, heat8, rng):
    mu = from_semigroup(unitary8)
    assert abs(continuity_constant_a(mu, [0.2, 1.1]) - 1.0) < 1e-9
    assert continuity_constant_a(from_semigroup(heat8), [0.0, 0.3]) <= 1.0 + 1e-12
    assert continuity_constant_a(zero_pseudomeasure(unitary8.grid), [0.0, 0.3]) == 0.0

    g = heat8.grid
    cells = [BaseSet.from_cells(g, [j]) for j in range(g.size)]
    pairs = [[a, b] for a in cells for b in cells]
    kernel = heat8(0.02).real.max() / g.spacing
    assert continuity_constant_b(from_semigroup(heat8), [0.0, 0.02], pairs) == pytest.approx(kernel, rel=1e-12)
    assert continuity_constant_b(zero_pseudomeasure(g), [0.0, 0.02], pairs) == 0.0
    mu_h = from_semigroup(heat8)
    assert continuity_constant_b(combine([2.0], [mu_h]), [0.0, 0.02], pairs) == pytest.approx(
        2 * continuity_constant_b(mu_h, [0.0, 0.02], pairs), rel=1e-12)
    with pytest.warns(UserWarning):
        continuity_constant_b(mu_h, [0.0, 0.02], [[BaseSet.empty(g), cells[0]], pairs[0]])


def test_additivity_random_splits(unitary8, rng):
    mu = from_semigroup(unitary8)
    g = unitary8.grid
    for _ in range(50):
        x = random_cylinder(g, rng, int(rng.integers(2, 4)))
        p = random_cylinder(g, rng, int(rng.integers(1, 4)))
        parts = difference(x, p) + [intersect(x, p)]
        assert abs(mu.eval(x) - mu.eval(RingElement.of(*parts))) < 1e-10


def test_from_operator_function_non_semigroup():
    g = make_grid(1, 4, 1.0)
    mu = from_operator_function(g, lambda t: np.cos(t) * np.eye(4))
    full = BaseSet.full(g)
    c = make_cylinder([0.0, 1.0], [full, full], retain_full=True)
    assert abs(mu.eval(c) - np.cos(1.0)) < 1e-14


def test_time_validation(unitary8):
    mu = from_semigroup(unitary8)
    with pytest.raises(ValueError):
        reconstruct_operator(mu, [1.0, 0.5])
    with pytest.raises(ValueError):
        reconstruct_operator(mu, [0.0, 0.5, 1.0])  # missing middle base
