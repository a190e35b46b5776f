"""Pseudomeasures: additive complex set functions on the cylinder ring.

A propagator-backed pseudomeasure assigns to ``A^{t_1..t_m}_{B_1..B_m}``
(``m >= 2``) the number

    inner(U(t_m - t_{m-1}) P_{B_{m-1}} ... U(t_2 - t_1) chi_{B_1}, chi_{B_m})

and to a one-time cylinder ``A^t_B`` the Lebesgue measure of ``B``.
Complemented ring elements are evaluated as ``1 - value(complement)``.

Multi-time operators are composed right to left: the earliest gap acts first.
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cylinder import CylinderSet, RingElement, make_cylinder, shift
from .grid import BaseSet, Grid, StateVector, inner, lebesgue
from .semigroup import Semigroup, operator_norm, propagate

__all__ = [
    "UnevaluableError",
    "Pseudomeasure",
    "PropagatorPseudomeasure",
    "LinearCombination",
    "TablePseudomeasure",
    "SesquilinearForm",
    "PropertyReport",
    "MarkovSample",
    "from_semigroup",
    "from_operator_function",
    "combine",
    "zero_pseudomeasure",
    "sesquilinear_eval",
    "reconstruct_operator",
    "check_markov",
    "check_stationary",
    "continuity_constant_a",
    "continuity_constant_b",
    "random_base",
    "random_cylinder",
    "random_markov_samples",
]


class UnevaluableError(LookupError):
    """Raised when a partial pseudomeasure has no value for a requested set."""


def _check_times(times: Sequence[float]) -> list[float]:
    times = [float(t) for t in times]
    if len(times) < 2:
        raise ValueError("need at least two times")
    if any(t < 0 for t in times):
        raise ValueError("times must be nonnegative")
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("times must be nondecreasing")
    return times


class Pseudomeasure:
    """Base class. Subclasses implement :meth:`eval_cylinder`."""

    grid: Grid

    def eval_cylinder(self, c: CylinderSet) -> complex:
        raise NotImplementedError

    def eval(self, a) -> complex:
        if isinstance(a, CylinderSet):
            return self.eval_cylinder(a)
        if not isinstance(a, RingElement):
            raise TypeError(f"cannot evaluate on {type(a).__name__}")
        total = complex(sum(self.eval_cylinder(p) for p in a.parts))
        return 1.0 - total if a.complemented else total

    __call__ = eval

    def operator(self, times: Sequence[float], mid_bases: Sequence[BaseSet] = ()) -> np.ndarray:
        """Matrix ``M`` with ``inner(M u, v)`` equal to the multi-time form.

        The generic route probes the form on pairs of single-cell indicators.
        """
        times = _check_times(times)
        if len(mid_bases) != len(times) - 2:
            raise ValueError(f"{len(times)} times need {len(times) - 2} middle bases")
        g = self.grid
        n = g.size
        m = np.empty((n, n), dtype=complex)
        cells = [BaseSet.from_cells(g, [j]) for j in range(n)]
        for j in range(n):
            for k in range(n):
                c = make_cylinder(times, [cells[j], *mid_bases, cells[k]], retain_full=True)
                m[k, j] = self.eval_cylinder(c) / g.cell_volume
        return m

    def __add__(self, other: "Pseudomeasure") -> "LinearCombination":
        return combine([1.0, 1.0], [self, other])

    def __sub__(self, other: "Pseudomeasure") -> "LinearCombination":
        return combine([1.0, -1.0], [self, other])

    def __rmul__(self, alpha) -> "LinearCombination":
        return combine([alpha], [self])

    def __neg__(self) -> "LinearCombination":
        return combine([-1.0], [self])


class PropagatorPseudomeasure(Pseudomeasure):
    """Pseudomeasure built from an operator-valued function of the time gap.

    When the function is a semigroup this is the semigroup's pseudomeasure;
    any other operator family (for instance a weak limit) is also accepted.
    """

    def __init__(self, grid: Grid, propagator: Callable[[float], np.ndarray], semigroup=None,
                 label: str = ""):
        self.grid = grid
        self.semigroup = semigroup
        self.label = label
        self._propagator = propagator
        self._cache: dict[float, np.ndarray] = {}
        self._lock = threading.Lock()

    def propagator(self, gap: float) -> np.ndarray:
        gap = float(gap)
        u = self._cache.get(gap)
        if u is None:
            u = np.asarray(self._propagator(gap), dtype=complex)
            with self._lock:
                if len(self._cache) > 256:
                    self._cache.clear()
                self._cache[gap] = u
        return u

    def eval_cylinder(self, c: CylinderSet) -> complex:
        if c.is_empty():
            return 0j
        if c.m == 1:
            return complex(lebesgue(c.bases[0]))
        vec = c.bases[0].mask.astype(complex)
        for j in range(1, c.m):
            vec = self.propagator(c.times[j] - c.times[j - 1]) @ vec
            if j < c.m - 1:
                vec = np.where(c.bases[j].mask, vec, 0)
        return complex(self.grid.cell_volume * vec[c.bases[-1].mask].sum())

    def operator(self, times, mid_bases=()) -> np.ndarray:
        times = _check_times(times)
        if len(mid_bases) != len(times) - 2:
            raise ValueError(f"{len(times)} times need {len(times) - 2} middle bases")
        m = self.propagator(times[1] - times[0])
        for j, b in enumerate(mid_bases, start=1):
            m = self.propagator(times[j + 1] - times[j]) @ (b.mask[:, None] * m)
        return np.array(m, dtype=complex)

    def __repr__(self) -> str:
        return f"PropagatorPseudomeasure({self.label or 'custom'})"


class LinearCombination(Pseudomeasure):
    def __init__(self, coeffs: Sequence[complex], parts: Sequence[Pseudomeasure]):
        if len(coeffs) != len(parts):
            raise ValueError(f"{len(coeffs)} coefficients but {len(parts)} pseudomeasures")
        if not parts:
            raise ValueError("need at least one pseudomeasure")
        grid = parts[0].grid
        if any(p.grid != grid for p in parts):
            raise ValueError("pseudomeasures live on different grids")
        self.grid = grid
        self.coeffs = [complex(c) for c in coeffs]
        self.parts = list(parts)

    def eval_cylinder(self, c: CylinderSet) -> complex:
        return complex(sum(a * p.eval_cylinder(c) for a, p in zip(self.coeffs, self.parts)))

    def eval(self, a) -> complex:
        # members are extended to complemented sets individually, then combined
        return complex(sum(c * p.eval(a) for c, p in zip(self.coeffs, self.parts)))

    def operator(self, times, mid_bases=()) -> np.ndarray:
        return sum(c * p.operator(times, mid_bases) for c, p in zip(self.coeffs, self.parts))


class TablePseudomeasure(Pseudomeasure):
    """Partial pseudomeasure given by explicit values on canonical cylinders."""

    def __init__(self, grid: Grid, entries: dict[CylinderSet, complex] | None = None):
        self.grid = grid
        self.entries: dict[CylinderSet, complex] = {}
        for c, v in (entries or {}).items():
            self.entries[self._key(c)] = complex(v)

    @staticmethod
    def _key(c: CylinderSet) -> CylinderSet:
        return c if c.is_empty() else make_cylinder(c.times, c.bases)

    def __setitem__(self, c: CylinderSet, value: complex):
        self.entries[self._key(c)] = complex(value)

    def eval_cylinder(self, c: CylinderSet) -> complex:
        if c.is_empty():
            return 0j
        try:
            return self.entries[self._key(c)]
        except KeyError:
            raise UnevaluableError(f"no value stored for {c!r}") from None


def from_semigroup(sg: Semigroup) -> PropagatorPseudomeasure:
    return PropagatorPseudomeasure(sg.grid, lambda gap: propagate(sg, gap), semigroup=sg,
                                   label=f"{sg.mode}:{sg.generator.kind}")


def from_operator_function(grid: Grid, family: Callable[[float], np.ndarray],
                           label: str = "operator-function") -> PropagatorPseudomeasure:
    return PropagatorPseudomeasure(grid, family, label=label)


def combine(coeffs: Sequence[complex], parts: Sequence[Pseudomeasure]) -> LinearCombination:
    return LinearCombination(coeffs, parts)


def zero_pseudomeasure(grid: Grid) -> PropagatorPseudomeasure:
    """The zero element (zero propagator, and zero on one-time sets)."""
    zero = np.zeros((grid.size, grid.size), dtype=complex)

    class _Zero(PropagatorPseudomeasure):
        def eval_cylinder(self, c):
            return 0j

        def eval(self, a):
            return 0j

    return _Zero(grid, lambda gap: zero, label="zero")


@dataclass(frozen=True)
class SesquilinearForm:
    mu: Pseudomeasure
    times: tuple[float, ...]
    mid_bases: tuple[BaseSet, ...] = ()

    def operator(self) -> np.ndarray:
        return self.mu.operator(self.times, self.mid_bases)

    def __call__(self, f: StateVector, g: StateVector) -> complex:
        return sesquilinear_eval(self, f, g)


def sesquilinear_eval(form: SesquilinearForm, f: StateVector, g: StateVector) -> complex:
    grid = form.mu.grid
    if f.grid != grid or g.grid != grid:
        raise ValueError("vectors live on a different grid than the form")
    return inner(StateVector(grid, form.operator() @ f.values), g)


def reconstruct_operator(mu: Pseudomeasure, times: Sequence[float],
                         mid_bases: Sequence[BaseSet] = ()) -> np.ndarray:
    return mu.operator(_check_times(times), mid_bases)


@dataclass
class PropertyReport:
    property: str
    max_residual: float
    n_samples: int
    witness: object = None
    notes: dict = field(default_factory=dict)

    def passed(self, tol: float) -> bool:
        return self.max_residual < tol

    def to_dict(self) -> dict:
        return {"property": self.property, "max_residual": self.max_residual,
                "n_samples": self.n_samples, "witness": self.witness, **self.notes}


@dataclass(frozen=True)
class MarkovSample:
    """Times ``t_0 <= ... <= t_n``, bases ``B_1..B_{n-1}`` and the split index ``0 < k < n``."""

    times: tuple[float, ...]
    bases: tuple[BaseSet, ...]
    split: int

    def describe(self) -> dict:
        return {"times": list(self.times), "split": self.split,
                "bases": [b.cells.tolist() for b in self.bases]}


def check_markov(mu: Pseudomeasure, samples: Sequence[MarkovSample]) -> PropertyReport:
    """Largest violation of the evolution law and of the normalization ``A^{t,t} = I``.

    For each sample the residual is
    ``|| A(t_k..t_n) P_{B_k} A(t_0..t_k) - A(t_0..t_n) ||``.
    """
    worst, witness = 0.0, None
    eye = np.eye(mu.grid.size)
    for s in samples:
        t, b, k = list(s.times), list(s.bases), s.split
        if not 0 < k < len(t) - 1 or len(b) != len(t) - 2:
            raise ValueError("malformed Markov sample")
        early = mu.operator(t[: k + 1], b[: k - 1])
        late = mu.operator(t[k:], b[k:])
        whole = mu.operator(t, b)
        r = operator_norm(late @ (b[k - 1].mask[:, None] * early) - whole)
        r = max(r, operator_norm(mu.operator([t[0], t[0]]) - eye))
        if r > worst or witness is None:
            worst, witness = r, s.describe()
    return PropertyReport("markov", worst, len(samples), witness)


def check_stationary(mu: Pseudomeasure, s: float, samples: Sequence[CylinderSet]) -> PropertyReport:
    if s < 0:
        raise ValueError("shift must be nonnegative")
    worst, witness = 0.0, None
    for c in samples:
        r = abs(mu.eval(c) - mu.eval(shift(c, s))) if s else 0.0
        if r > worst or witness is None:
            worst, witness = r, {"times": list(c.times)}
    return PropertyReport("stationary", worst, len(samples), witness, {"shift": s})


def continuity_constant_a(mu: Pseudomeasure, times: Sequence[float],
                          mid_bases: Sequence[BaseSet] = ()) -> float:
    """Norm of the multi-time sesquilinear form, exact via singular values."""
    return operator_norm(reconstruct_operator(mu, times, mid_bases))


def continuity_constant_b(mu: Pseudomeasure, times: Sequence[float],
                          base_samples: Sequence[Sequence[BaseSet]]) -> float:
    """Least ``M`` with ``|mu(A)| <= M^m prod mu_L(B_k)`` over the sampled bases.

    ``times`` holds ``t_0..t_m``; each sample supplies ``m + 1`` bases.
    Samples containing a null base are skipped with a warning.
    """
    times = _check_times(times)
    m = len(times) - 1
    best, skipped = 0.0, 0
    for bases in base_samples:
        if len(bases) != m + 1:
            raise ValueError(f"each sample needs {m + 1} bases")
        vol = float(np.prod([lebesgue(b) for b in bases]))
        if vol == 0.0:
            skipped += 1
            continue
        value = abs(mu.eval(make_cylinder(times, bases, retain_full=True)))
        best = max(best, (value / vol) ** (1.0 / m))
    if skipped:
        warnings.warn(f"continuity_constant_b skipped {skipped} sample(s) with a null base",
                      stacklevel=2)
    return best


def random_base(grid: Grid, rng: np.random.Generator, p: float = 0.5) -> BaseSet:
    mask = rng.random(grid.size) < p
    if not mask.any():
        mask[rng.integers(grid.size)] = True
    return BaseSet(grid, mask)


def random_cylinder(grid: Grid, rng: np.random.Generator, m: int, t_max: float = 1.0,
                    retain_full: bool = False) -> CylinderSet:
    times = np.sort(rng.uniform(0.0, t_max, size=m))
    return make_cylinder(times, [random_base(grid, rng) for _ in range(m)], retain_full=retain_full)


def random_markov_samples(grid: Grid, rng: np.random.Generator, n: int, max_times: int = 5,
                          t_max: float = 1.0) -> list[MarkovSample]:
    out = []
    for _ in range(n):
        k_times = int(rng.integers(3, max_times + 1))
        times = tuple(float(t) for t in np.sort(rng.uniform(0.0, t_max, size=k_times)))
        bases = tuple(random_base(grid, rng) for _ in range(k_times - 2))
        split = int(rng.integers(1, k_times - 1))
        out.append(MarkovSample(times, bases, split))
    return out
