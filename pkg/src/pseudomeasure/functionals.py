"""Functionals on pseudomeasure space and strong/weak convergence diagnostics."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import (LinearCombination, Pseudomeasure, PropagatorPseudomeasure, from_operator_function,
                   from_semigroup, reconstruct_operator)
from .cylinder import make_cylinder
from .grid import BaseSet, StateVector
from .semigroup import RandomSemigroup, Semigroup, propagate

__all__ = [
    "DensityState",
    "ConvergenceReport",
    "p_cyl",
    "p_stvw",
    "p_vT",
    "check_eq15",
    "f_state",
    "f_state_eigensum",
    "seminorm_V",
    "SeminormEstimate",
    "random_observable",
    "convergence_report",
    "cylinder_gaps",
]

DEFAULT_TIME_SAMPLES = 64


def _wnorm(grid, values: np.ndarray) -> float:
    return float(np.sqrt(grid.cell_volume) * np.linalg.norm(values))


def p_cyl(mu: Pseudomeasure, a) -> complex:
    return mu.eval(a)


def p_stvw(mu: Pseudomeasure, s: float, t: float, v: StateVector, w: StateVector) -> float:
    """``|beta^{s,t}(v, w)|``, the absolute two-time form value."""
    if not s < t:
        raise ValueError("need s < t")
    m = reconstruct_operator(mu, [s, t])
    return abs(mu.grid.cell_volume * np.vdot(w.values, m @ v.values))


def _time_grid(T: float, samples: int) -> np.ndarray:
    if T < 0:
        raise ValueError("T must be nonnegative")
    if samples < 2:
        raise ValueError("need at least two time samples")
    return np.linspace(0.0, T, samples)


def p_vT(mu: Pseudomeasure, v: StateVector, T: float, time_samples: int = DEFAULT_TIME_SAMPLES) -> float:
    """Sampled ``sup_{t <= T} sup_{||w|| = 1} |beta^{0,t}(v, w)|``.

    For fixed ``t`` the inner supremum is the norm of ``A^{0,t} v``.
    """
    best = 0.0
    for t in _time_grid(T, time_samples):
        best = max(best, _wnorm(mu.grid, reconstruct_operator(mu, [0.0, t]) @ v.values))
    return best


def check_eq15(sg: Semigroup, v: StateVector, T: float,
               time_samples: int = DEFAULT_TIME_SAMPLES) -> float:
    """Gap between the pseudomeasure seminorm and the semigroup's ``sup_t ||U(t) v||``."""
    lhs = p_vT(from_semigroup(sg), v, T, time_samples)
    rhs = max(_wnorm(sg.grid, propagate(sg, t) @ v.values) for t in _time_grid(T, time_samples))
    return abs(lhs - rhs)


@dataclass(frozen=True, eq=False)
class DensityState:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if np.abs(m - m.conj().T).max() > 1e-10:
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(m) - 1) > 1e-10:
            raise ValueError("density matrix must have unit trace")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("density matrix must be positive semidefinite")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def pure(cls, u) -> "DensityState":
        u = np.asarray(getattr(u, "values", u), dtype=complex)
        u = u / np.linalg.norm(u)
        return cls(np.outer(u, u.conj()))

    @classmethod
    def mixture(cls, vectors: Sequence, probs: Sequence[float]) -> "DensityState":
        probs = np.asarray(probs, dtype=float)
        if probs.min() < 0 or abs(probs.sum() - 1) > 1e-12:
            raise ValueError("mixture weights must be a probability vector")
        m = sum(p * cls.pure(u).matrix for p, u in zip(probs, vectors))
        return cls(m)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, rank: int = 1) -> "DensityState":
        vecs = rng.standard_normal((rank, n)) + 1j * rng.standard_normal((rank, n))
        probs = rng.dirichlet(np.ones(rank)) if rank > 1 else np.ones(1)
        return cls.mixture(list(vecs), probs)

    def spectral_decomposition(self) -> tuple[np.ndarray, np.ndarray]:
        w, q = np.linalg.eigh(self.matrix)
        w = np.clip(w, 0.0, None)
        return w / w.sum(), q


def _check_observable(obs: np.ndarray) -> np.ndarray:
    obs = np.asarray(obs, dtype=complex)
    if np.abs(obs - obs.conj().T).max() > 1e-10:
        raise ValueError("observable must be Hermitian")
    return obs


def f_state(mu: Pseudomeasure, rho: DensityState, obs: np.ndarray, t1: float, t2: float) -> float:
    """``trace(rho V A V^H)`` with ``V`` the two-time operator of ``mu`` on ``[t1, t2]``."""
    if t2 < t1:
        raise ValueError("need t1 <= t2")
    obs = _check_observable(obs)
    v = reconstruct_operator(mu, [t1, t2])
    return float(np.real(np.trace(rho.matrix @ v @ obs @ v.conj().T)))


def f_state_eigensum(mu: Pseudomeasure, rho: DensityState, obs: np.ndarray, t1: float,
                     t2: float) -> float:
    """Same value as :func:`f_state` via eigen-expansions of ``A`` and of ``rho``.

    ``sum_j p_j sum_k a_k |<u_j, V psi_k>|^2`` where ``rho = sum_j p_j |u_j><u_j|``.
    """
    a, psi = np.linalg.eigh(_check_observable(obs))
    v = reconstruct_operator(mu, [t1, t2])
    probs, us = rho.spectral_decomposition()
    vpsi = v @ psi
    total = 0.0
    for p, u in zip(probs, us.T):
        if p == 0:
            continue
        total += p * float(np.sum(a * np.abs(u.conj() @ vpsi) ** 2))
    return total


def random_observable(n: int, rng: np.random.Generator, positive: bool = False) -> np.ndarray:
    """Random Hermitian matrix of unit operator norm."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = g @ g.conj().T if positive else 0.5 * (g + g.conj().T)
    return h / np.linalg.norm(h, 2)


@dataclass
class SeminormEstimate:
    value: float
    n_probes: int
    probe_values: list[float] = field(default_factory=list)

    def __float__(self) -> float:
        return self.value


def seminorm_V(mu: Pseudomeasure, probe_budget: int, rng: np.random.Generator,
               t_window: tuple[float, float] = (0.0, 1.0)) -> SeminormEstimate:
    """Sampled lower bound for ``sup |F_{rho,A}^{t1,t2}(mu)|`` over ``||A|| = 1``.

    The first probe uses the identity observable; the rest draw random
    unit-norm observables, pure states and ordered time pairs in ``t_window``.
    """
    if probe_budget < 1:
        raise ValueError("probe budget must be at least 1")
    n = mu.grid.size
    vals = []
    for k in range(probe_budget):
        t1, t2 = np.sort(rng.uniform(*t_window, size=2))
        rho = DensityState.random(n, rng)
        obs = np.eye(n) if k == 0 else random_observable(n, rng)
        vals.append(abs(f_state(mu, rho, obs, t1, t2)))
    return SeminormEstimate(max(vals), probe_budget, vals)


@dataclass
class ConvergenceReport:
    parameters: list
    strong: list[float]
    weak: list[float]
    seminorm: list[float]
    verdict: str
    T: float
    time_samples: int
    refinement_delta: float = 0.0

    def rows(self) -> list[dict]:
        return [{"index": i, "parameter": p, "strong_uniform": s, "weak_gap": w, "seminorm": q}
                for i, (p, s, w, q) in enumerate(zip(self.parameters, self.strong, self.weak,
                                                     self.seminorm))]

    def write_csv(self, path) -> None:
        rows = self.rows()
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            for r in rows:
                writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})

    def verdict_json(self) -> str:
        return json.dumps({"verdict": self.verdict, "T": self.T, "time_samples": self.time_samples,
                           "refinement_delta": self.refinement_delta,
                           "note": "suprema are sampled lower bounds on a uniform time grid"},
                          indent=2, sort_keys=True)


def _unit(v: StateVector) -> np.ndarray:
    n = v.norm()
    if n == 0:
        raise ValueError("probe vectors must be nonzero")
    return v.values / n


def convergence_report(family: RandomSemigroup, reference, T: float, probes: Sequence[StateVector],
                       time_samples: int = DEFAULT_TIME_SAMPLES,
                       weak_times: Sequence[float] | None = None,
                       weak_tol: float = 2e-2) -> ConvergenceReport:
    """Distances of each family member to a reference evolution.

    ``reference`` is a :class:`Semigroup` or any function ``t -> matrix``.
    Probe vectors are normalized. Strong distances are
    ``max_v sup_t ||(U_n(t) - F(t)) v||``; weak gaps are
    ``max_{v,w} |(w, (U_n(t) - F(t)) v)|`` over ``weak_times``; seminorm
    distances are ``max_v P_{v,T}(mu_n - mu_F)`` computed through the
    pseudomeasures.
    """
    grid = family.grid
    ref_fn: Callable[[float], np.ndarray] = (
        (lambda t: propagate(reference, t)) if isinstance(reference, Semigroup) else reference)
    mu_ref = (from_semigroup(reference) if isinstance(reference, Semigroup)
              else from_operator_function(grid, reference))
    ts = _time_grid(T, time_samples)
    wts = list(ts if weak_times is None else weak_times)
    units = [_unit(v) for v in probes]
    unit_states = [StateVector(grid, u) for u in units]
    w = grid.cell_volume
    ref_cache = {float(t): ref_fn(t) for t in set(map(float, ts)) | set(map(float, wts))}
    strong, weak, semi = [], [], []
    refinement = 0.0
    for i in range(len(family)):
        sg = family.member(i)
        s_best, w_best = 0.0, 0.0
        for t in ts:
            diff = propagate(sg, t) - ref_cache[float(t)]
            for u in units:
                s_best = max(s_best, _wnorm(grid, diff @ u))
        for t in wts:
            diff = propagate(sg, t) - ref_cache[float(t)]
            for u in units:
                du = diff @ u
                for v in units:
                    w_best = max(w_best, abs(w * np.vdot(v, du)))
        delta = LinearCombination([1.0, -1.0], [from_semigroup(sg), mu_ref])
        q = max(p_vT(delta, v, T, time_samples) for v in unit_states)
        q_fine = max(p_vT(delta, v, T, 2 * time_samples - 1) for v in unit_states)
        refinement = max(refinement, abs(q_fine - q))
        strong.append(s_best)
        weak.append(w_best)
        semi.append(q)
    verdict = _verdict(strong, weak, semi, weak_tol)
    return ConvergenceReport(list(family.parameters), strong, weak, semi, verdict, T, time_samples,
                             refinement)


def _verdict(strong, weak, semi, weak_tol) -> str:
    def falls(seq):
        return all(b <= a + 1e-12 for a, b in zip(seq, seq[1:])) and seq[-1] <= 0.25 * seq[0] + 1e-10

    if falls(strong) and falls(semi):
        return "strong+seminorm co-converge"
    if weak[-1] < weak_tol and strong[-1] > 0.25 * max(strong[0], 1e-12):
        return "weak-only"
    return "inconclusive"


def cylinder_gaps(mu_n: Pseudomeasure, nu: PropagatorPseudomeasure, t: float, s: float, V: BaseSet,
                  W: BaseSet, Y: BaseSet) -> tuple[float, float]:
    """Two-time and three-time discrepancies between ``mu_n`` and the limit-built ``nu``.

    Returns ``(|mu_n(A^{0,t}_{V,W}) - nu(...)|, |mu_n(A^{0,t,t+s}_{V,W,Y}) - nu(...)|)``.
    """
    two = make_cylinder([0.0, t], [V, W], retain_full=True)
    three = make_cylinder([0.0, t, t + s], [V, W, Y], retain_full=True)
    return abs(mu_n.eval(two) - nu.eval(two)), abs(mu_n.eval(three) - nu.eval(three))
