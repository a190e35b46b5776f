"""Finitely additive parameter measures, Pettis means and Young measures.

Every parameter measure here lives on a finite ordered parameter list, so
integrals are finite weighted sums. Two-valued measures concentrated at the
end of the list are approximated by *tail selectors*: a Dirac mass at the
last index of the list that matches an arithmetic pattern. Verdicts built on
them concern the sampled prefix only.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import LinearCombination, Pseudomeasure
from .grid import Grid
from .semigroup import RandomSemigroup, operator_norm, propagate

__all__ = [
    "ParamMeasure",
    "make_param_measure",
    "MeanEvolution",
    "mean_evolution",
    "memory_defect",
    "mean_pseudomeasure",
    "product_measure_eval",
    "LimitPointResult",
    "limit_points",
    "YoungMeasure",
    "young_measure",
]

TIME_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ParamMeasure:
    parameter_set: tuple
    weights: np.ndarray
    kind: str = "weights"
    description: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.parameter_set),):
            raise ValueError("one weight per parameter required")
        if w.min(initial=0.0) < 0:
            raise ValueError("weights must be nonnegative")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {math.fsum(w)!r}")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "parameter_set", tuple(self.parameter_set))

    @property
    def support(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.weights)]

    def integrate(self, f):
        """``int f d(mu)`` for ``f`` given as a callable on parameters or as per-parameter values."""
        if callable(f):
            idx = self.support
            vals = [f(self.parameter_set[i]) for i in idx]
            w = self.weights[idx]
        else:
            vals, w = list(f), self.weights
            if len(vals) != len(w):
                raise ValueError("one value per parameter required")
        arr = np.asarray(vals)
        return np.tensordot(w, arr, axes=(0, 0)) if arr.ndim > 1 else _pairwise_dot(w, arr)

    def measure_of(self, indices: Iterable[int]) -> float:
        return float(math.fsum(self.weights[list(indices)]))

    def mix(self, lam: float, other: "ParamMeasure") -> "ParamMeasure":
        if other.parameter_set != self.parameter_set:
            raise ValueError("measures live on different parameter sets")
        w = lam * self.weights + (1 - lam) * other.weights
        return ParamMeasure(self.parameter_set, w / math.fsum(w), "weights")


def _pairwise_dot(w: np.ndarray, v: np.ndarray):
    prod = w * v
    return prod.sum() if prod.dtype.kind == "c" else float(prod.sum())


def make_param_measure(E: Sequence, kind: str = "uniform", **spec) -> ParamMeasure:
    """Build a measure on the ordered parameter list ``E``.

    Kinds: ``uniform``; ``weights`` (``weights=``); ``dirac`` (``index=`` or
    ``value=``); ``cesaro`` (uniform on the last ``window`` entries);
    ``tail_selector`` (Dirac at the last index ``i`` with
    ``i % modulus == residue``).
    """
    n = len(E)
    if n == 0:
        raise ValueError("parameter set must be nonempty")
    w = np.zeros(n)
    if kind == "uniform":
        w[:] = 1.0 / n
    elif kind == "weights":
        w = np.asarray(spec["weights"], dtype=float)
    elif kind == "dirac":
        i = spec["index"] if "index" in spec else list(E).index(spec["value"])
        w[i] = 1.0
    elif kind == "cesaro":
        window = int(spec.get("window", n))
        if not 1 <= window <= n:
            raise ValueError(f"window must be in [1, {n}]")
        w[n - window:] = 1.0 / window
    elif kind == "tail_selector":
        modulus, residue = int(spec.get("modulus", 2)), int(spec.get("residue", 0))
        hits = [i for i in range(n) if i % modulus == residue % modulus]
        if not hits:
            raise ValueError("selector picks nothing from this prefix")
        w[hits[-1]] = 1.0
    else:
        raise ValueError(f"unknown measure kind {kind!r}")
    return ParamMeasure(tuple(E), w, kind, dict(spec))


@dataclass(frozen=True, eq=False)
class MeanEvolution:
    grid: Grid
    times: tuple[float, ...]
    matrices: np.ndarray

    def index_of(self, t: float) -> int:
        for i, u in enumerate(self.times):
            if abs(u - t) <= TIME_TOL:
                return i
        raise KeyError(f"time {t!r} was not sampled")

    def __call__(self, t: float) -> np.ndarray:
        return self.matrices[self.index_of(t)]

    def write_csv(self, path, probe: np.ndarray | None = None) -> None:
        """One row per time: all entries for small matrices, else ``<probe, M(t) probe>``."""
        n = self.grid.size
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if n * n <= 16 and probe is None:
                cols = [f"{k}_{j}" for k in range(n) for j in range(n)]
                writer.writerow(["t"] + [f"re_{c}" for c in cols] + [f"im_{c}" for c in cols])
                for t, m in zip(self.times, self.matrices):
                    flat = m.ravel()
                    writer.writerow([repr(t)] + [repr(float(x)) for x in flat.real]
                                    + [repr(float(x)) for x in flat.imag])
            else:
                p = np.ones(n) / np.sqrt(n) if probe is None else np.asarray(probe)
                writer.writerow(["t", "re_probe", "im_probe"])
                for t, m in zip(self.times, self.matrices):
                    z = np.vdot(p, m @ p)
                    writer.writerow([repr(t), repr(float(z.real)), repr(float(z.imag))])


def mean_evolution(xi: RandomSemigroup, nu: ParamMeasure, times: Sequence[float]) -> MeanEvolution:
    """Pettis mean ``M(t) = sum_eps w(eps) U_eps(t)`` at each requested time."""
    if tuple(xi.parameters) != nu.parameter_set:
        raise ValueError("measure and random semigroup use different parameter sets")
    idx = nu.support
    mats = []
    for t in times:
        stack = np.stack([propagate(xi.member(i), t) for i in idx])
        mats.append(np.tensordot(nu.weights[idx], stack, axes=(0, 0)))
    return MeanEvolution(xi.grid, tuple(float(t) for t in times), np.array(mats))


def memory_defect(me: MeanEvolution, t: float, s: float) -> float:
    """``||M(t + s) - M(t) M(s)||``; all three times must have been sampled."""
    return operator_norm(me(t + s) - me(t) @ me(s))


def mean_pseudomeasure(family: Sequence[Pseudomeasure], nu: ParamMeasure) -> LinearCombination:
    """Weighted mean ``A -> sum_eps w(eps) mu_eps(A)``, evaluated lazily."""
    if len(family) != len(nu.parameter_set):
        raise ValueError("one pseudomeasure per parameter required")
    idx = nu.support
    return LinearCombination([nu.weights[i] for i in idx], [family[i] for i in idx])


def product_measure_eval(nu: ParamMeasure, family: Sequence[Pseudomeasure], subset: Iterable[int],
                         a_omega) -> complex:
    """Value of the product set function on the rectangle ``subset x a_omega``."""
    subset = sorted(set(int(i) for i in subset))
    return complex(sum(nu.weights[i] * family[i].eval(a_omega) for i in subset if nu.weights[i]))


@dataclass
class LimitPointResult:
    means: list
    distances_to_tail: list[float]
    is_accumulation: list[bool]
    selectors_agree: bool
    max_disagreement: float
    note: str = "verdicts concern the sampled finite prefix"


def limit_points(values: Sequence, selectors: Sequence[ParamMeasure], tol: float | None = None,
                 agree_tol: float = 1e-9, tail_fraction: float = 0.5) -> LimitPointResult:
    """Means of a bounded list under each selector, checked against the list's tail.

    A mean is accepted as an accumulation point when it lies within ``tol`` of
    some element of the final ``tail_fraction`` of the list.
    """
    if len(values) == 0:
        raise ValueError("empty list")
    arr = np.asarray(values)
    flat = arr.reshape(len(arr), -1)
    scale = float(np.abs(flat).max(initial=0.0))
    if tol is None:
        tol = 1e-6 * max(scale, 1.0)
    tail = flat[int(len(flat) * (1 - tail_fraction)):] if len(flat) > 1 else flat
    means, dists = [], []
    for sel in selectors:
        if len(sel.parameter_set) != len(arr):
            raise ValueError("selector does not match the list length")
        m = np.tensordot(sel.weights, arr, axes=(0, 0))
        means.append(m)
        dists.append(float(np.min(np.linalg.norm(tail - np.ravel(m), axis=1))))
    gaps = [float(np.linalg.norm(np.ravel(a) - np.ravel(b))) for i, a in enumerate(means)
            for b in means[i + 1:]]
    worst = max(gaps, default=0.0)
    return LimitPointResult(means, dists, [d < tol for d in dists], worst < agree_tol, worst)


@dataclass
class YoungMeasure:
    probes: list[tuple[float, int]]
    re_edges: list[np.ndarray]
    im_edges: list[np.ndarray]
    masses: list[np.ndarray]
    widened: list[bool]

    def centers(self, i: int) -> np.ndarray:
        re = 0.5 * (self.re_edges[i][1:] + self.re_edges[i][:-1])
        im = 0.5 * (self.im_edges[i][1:] + self.im_edges[i][:-1])
        return re[:, None] + 1j * im[None, :]

    def integrate(self, f: Callable[[np.ndarray], np.ndarray], i: int) -> complex:
        return complex(np.sum(self.masses[i] * f(self.centers(i))))

    def mean(self, i: int) -> complex:
        return self.integrate(lambda z: z, i)

    def to_json(self) -> str:
        recs = [{"probe": {"t": t, "x": x}, "bin_edges": {"re": re.tolist(), "im": im.tolist()},
                 "masses": m.tolist(), "widened": wd}
                for (t, x), re, im, m, wd in zip(self.probes, self.re_edges, self.im_edges,
                                                 self.masses, self.widened)]
        return json.dumps(recs, sort_keys=True)


def young_measure(field: Callable, nu: ParamMeasure, probes: Sequence[tuple[float, int]],
                  bins: int = 64, value_range: tuple[tuple[float, float], tuple[float, float]] | None = None
                  ) -> YoungMeasure:
    """Weighted value histograms of ``field(eps, t, x)`` over the parameters.

    ``value_range`` fixes ``((re_lo, re_hi), (im_lo, im_hi))``; values outside
    it widen the range and the probe is flagged.
    """
    idx = nu.support
    w = nu.weights[idx]
    out = YoungMeasure([], [], [], [], [])
    for t, x in probes:
        z = np.array([field(nu.parameter_set[i], t, x) for i in idx], dtype=complex)
        widened = False
        if value_range is None:
            (rlo, rhi), (ilo, ihi) = _span(z.real), _span(z.imag)
        else:
            (rlo, rhi), (ilo, ihi) = value_range
            if z.real.min() < rlo or z.real.max() > rhi or z.imag.min() < ilo or z.imag.max() > ihi:
                widened = True
                rlo, rhi = min(rlo, *_span(z.real)), max(rhi, *_span(z.real))
                ilo, ihi = min(ilo, *_span(z.imag)), max(ihi, *_span(z.imag))
        re_edges = np.linspace(rlo, rhi, bins + 1)
        im_edges = np.linspace(ilo, ihi, bins + 1)
        hist, _, _ = np.histogram2d(z.real, z.imag, bins=[re_edges, im_edges], weights=w)
        out.probes.append((float(t), int(x)))
        out.re_edges.append(re_edges)
        out.im_edges.append(im_edges)
        out.masses.append(hist)
        out.widened.append(widened)
    return out


def _span(v: np.ndarray) -> tuple[float, float]:
    lo, hi = float(v.min()), float(v.max())
    pad = max(1e-9, 1e-6 * (hi - lo))
    if hi - lo < 1e-9:
        pad = 0.5
    return lo - pad, hi + pad
