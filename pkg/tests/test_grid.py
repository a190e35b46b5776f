import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudomeasure.grid import BaseSet, StateVector, indicator, inner, lebesgue, make_grid, project


def test_make_grid_spacing():
    g = make_grid(1, 8, 1.0)
    assert g.spacing == 0.125
    g2 = make_grid(2, 4, 2.0)
    assert g2.size == 16 and g2.spacing == 0.5
    assert abs(g2.spacing * g2.cells_per_axis - g2.extent) < 1e-12


@pytest.mark.parametrize("args", [(1, 0, 1.0), (3, 4, 1.0), (1, 4, 0.0), (1, 4, -1.0)])
def test_make_grid_rejects(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_indicator_examples():
    g = make_grid(1, 4, 1.0)
    assert np.all(indicator(BaseSet.empty(g)).values == 0)
    assert np.all(indicator(BaseSet.full(g)).values == 1)
    assert indicator(BaseSet.from_cells(g, [0])).values.tolist() == [1, 0, 0, 0]


def test_inner_hand_value():
    g = make_grid(1, 2, 1.0)
    u = StateVector(g, np.array([1, 1j]))
    v = StateVector(g, np.array([1j, 1]))
    assert inner(u, v) == 0
    # linear in the first slot, conjugate-linear in the second
    w = StateVector(g, np.array([1, 0]))
    assert inner(StateVector(g, 1j * w.values), w) == 0.5j
    assert inner(w, StateVector(g, 1j * w.values)) == -0.5j


def test_inner_grid_mismatch():
    with pytest.raises(ValueError):
        inner(StateVector.zeros(make_grid(1, 4, 1.0)), StateVector.zeros(make_grid(1, 8, 1.0)))


def test_lebesgue_examples():
    g = make_grid(1, 8, 1.0)
    assert lebesgue(BaseSet.from_cells(g, range(4))) == 0.5
    assert lebesgue(BaseSet.empty(g)) == 0
    assert lebesgue(BaseSet.full(make_grid(1, 4, 2.0))) == 2.0
    b = BaseSet.from_cells(g, [1, 5, 6])
    assert inner(indicator(b), indicator(b)) == pytest.approx(lebesgue(b), abs=1e-15)


def test_project_examples(rng):
    g = make_grid(2, 3, 1.0)
    v = StateVector(g, rng.standard_normal(g.size) + 0j)
    b = BaseSet.from_cells(g, [0, 4, 8])
    assert np.array_equal(project(BaseSet.full(g), v).values, v.values)
    assert np.all(project(BaseSet.empty(g), v).values == 0)
    once = project(b, v)
    assert np.array_equal(project(b, once).values, once.values)


def test_baseset_algebra():
    g = make_grid(1, 6, 1.0)
    b = BaseSet.from_cells(g, [0, 2, 3])
    assert ~~b == b
    assert (b | ~b).is_full() and (b & ~b).is_empty()
    assert len(b - BaseSet.from_cells(g, [2])) == 2
    with pytest.raises(ValueError):
        BaseSet.from_cells(g, [6])


def test_interval_and_cell_of():
    g = make_grid(1, 8, 1.0)
    assert BaseSet.interval(g, 0.25, 0.5).cells.tolist() == [2, 3]
    assert g.cell_of(np.array([[1.01], [-0.01]])).tolist() == [0, 7]
    g2 = make_grid(2, 4, 1.0)
    assert g2.cell_of(np.array([[0.3, 0.6]])).tolist() == [1 * 4 + 2]


vec = st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
               min_size=6, max_size=6)


@settings(max_examples=50, deadline=None)
@given(vec, vec, st.lists(st.booleans(), min_size=6, max_size=6))
def test_inner_properties(a, b, mask):
    g = make_grid(1, 6, 2.0)
    u, v = StateVector(g, np.array(a)), StateVector(g, np.array(b))
    assert abs(inner(u, v) - np.conj(inner(v, u))) <= 1e-12 * (1 + abs(inner(u, v)))
    base = BaseSet(g, np.array(mask))
    lhs, rhs = inner(project(base, u), v), inner(u, project(base, v))
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.booleans(), min_size=9, max_size=9), st.lists(st.booleans(), min_size=9, max_size=9))
def test_lebesgue_additive(m1, m2):
    g = make_grid(2, 3, 1.5)
    a = BaseSet(g, np.array(m1))
    b = BaseSet(g, np.array(m2)) - a
    assert lebesgue(a | b) == pytest.approx(lebesgue(a) + lebesgue(b), abs=1e-12)
