"""Monte Carlo Wiener-measure estimates on the torus and a quadrature Bessel oracle.

Brownian increments have variance ``2 dt`` per axis, which is the kernel of
``exp(t Laplacian)``. Paths start uniformly on the first base and are weighted
by its Lebesgue measure. Randomness is drawn from Philox streams keyed by
``(seed, chunk index)`` with a fixed chunk size, so results do not depend on
how many worker threads run.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import BaseSet, Grid, lebesgue

__all__ = ["McEstimate", "estimate_cylinder", "bessel_oracle", "z_score", "CHUNK"]

CHUNK = 8192


@dataclass(frozen=True)
class McEstimate:
    value: float
    stderr: float
    n_paths: int
    seed: int
    hits: int = 0

    def to_dict(self) -> dict:
        return {"mc_value": self.value, "mc_stderr": self.stderr, "n_paths": self.n_paths,
                "seed": self.seed}


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("PSEUDOMEASURE_THREADS", "1")))
    except ValueError:
        return 1


def _chunk_hits(grid: Grid, times, bases, start_cells, seed: int, chunk: int, n: int) -> int:
    rng = np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, chunk]))
    d, h = grid.dim, grid.spacing
    cells = start_cells[rng.integers(start_cells.size, size=n)]
    # cell index -> left corner, then a uniform offset inside the cell
    corner = np.empty((n, d))
    rem = cells.copy()
    for k in range(d - 1, -1, -1):
        corner[:, k] = (rem % grid.cells_per_axis) * h
        rem //= grid.cells_per_axis
    x = corner + rng.random((n, d)) * h
    alive = np.ones(n, dtype=bool)
    for j in range(1, len(times)):
        dt = times[j] - times[j - 1]
        x = np.mod(x + rng.standard_normal((n, d)) * np.sqrt(2.0 * dt), grid.extent)
        alive &= bases[j].mask[grid.cell_of(x)]
    return int(alive.sum())


def estimate_cylinder(grid: Grid, times: Sequence[float], bases: Sequence[BaseSet], n_paths: int,
                      seed: int) -> McEstimate:
    """Wiener-measure estimate of ``A^{t_1..t_m}_{B_1..B_m}`` on the torus."""
    times = [float(t) for t in times]
    if len(times) != len(bases) or len(times) < 2:
        raise ValueError("need m >= 2 times with one base each")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be strictly increasing")
    if n_paths < 1000:
        raise ValueError("n_paths must be at least 1000")
    start = bases[0].cells
    if start.size == 0:
        raise ValueError("first base is empty")
    n_chunks = -(-n_paths // CHUNK)
    sizes = [min(CHUNK, n_paths - c * CHUNK) for c in range(n_chunks)]

    def run(c):
        return _chunk_hits(grid, times, bases, start, seed, c, sizes[c])

    workers = _workers()
    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(run, range(n_chunks)))
    else:
        hits = sum(run(c) for c in range(n_chunks))
    weight = lebesgue(bases[0])
    frac = hits / n_paths
    return McEstimate(weight * frac, weight * np.sqrt(frac * (1 - frac) / n_paths), n_paths, seed,
                      hits)


def z_score(exact: float, est: McEstimate) -> float:
    diff = exact - est.value
    if est.stderr == 0:
        return 0.0 if abs(diff) < 1e-12 else float(np.copysign(np.inf, diff))
    return float(diff / est.stderr)


def bessel_oracle(t: float, points: int = 512) -> float:
    """``J_0(t) = (1/2 pi) int_0^{2 pi} cos(t sin theta) d theta`` by the periodic trapezoid rule."""
    theta = 2 * np.pi * np.arange(points) / points
    return float(np.mean(np.cos(t * np.sin(theta))))
