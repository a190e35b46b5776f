"""Self-adjoint generators on the grid and the semigroups they generate.

Propagators are evaluated through a cached Hermitian eigendecomposition
``L = Q diag(lam) Q^H``, so that ``U(t) = Q diag(f(lam, t)) Q^H`` for any real
``t``. Mode ``"unitary"`` means ``exp(-i t L)``, mode ``"heat"`` means
``exp(t L)`` (only for ``t >= 0``).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grid import Grid

__all__ = [
    "Generator",
    "Semigroup",
    "RandomSemigroup",
    "laplacian_matrix",
    "build_generator",
    "propagate",
    "semigroup_defect",
    "operator_norm",
    "make_family",
    "mollify",
    "FAMILIES",
]

HERMITIAN_TOL = 1e-10
MODES = ("unitary", "heat")


def operator_norm(m: np.ndarray) -> float:
    """Spectral norm; the grid weight is scalar so it does not affect this norm."""
    m = np.atleast_2d(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def laplacian_matrix(grid: Grid) -> np.ndarray:
    """Second-order periodic finite-difference Laplacian."""
    n, h = grid.cells_per_axis, grid.spacing
    shift = np.roll(np.eye(n), 1, axis=1)
    lap1 = (shift + shift.T - 2.0 * np.eye(n)) / h**2
    if grid.dim == 1:
        return lap1
    eye = np.eye(n)
    return np.kron(lap1, eye) + np.kron(eye, lap1)


@dataclass(eq=False)
class Generator:
    """A Hermitian matrix on the grid together with its cached eigenbasis."""

    grid: Grid
    kind: str
    matrix: np.ndarray
    eigenvalues: np.ndarray = field(repr=False, default=None)
    eigenvectors: np.ndarray | None = field(repr=False, default=None)

    def __post_init__(self):
        m = self.matrix
        if np.iscomplexobj(m) and np.abs(m.imag).max(initial=0.0) == 0.0:
            m = m.real
        self.matrix = m
        if self.eigenvalues is None:
            self._factorize()

    @property
    def is_diagonal(self) -> bool:
        return self.eigenvectors is None

    def _factorize(self):
        m = self.matrix
        offdiag = m - np.diag(np.diag(m))
        if not offdiag.any():
            self.eigenvalues = np.real(np.diag(m)).copy()
            self.eigenvectors = None
            return
        lam, q = np.linalg.eigh(m)
        scale = max(operator_norm(m), 1.0)
        residual = operator_norm(m - (q * lam) @ q.conj().T)
        if residual > 1e-8 * scale:
            raise np.linalg.LinAlgError(f"eigendecomposition residual {residual:.3e} too large")
        # round-off sized eigenvalues are zero; otherwise exp(t * lam) drifts at large t
        lam = np.where(np.abs(lam) < 64 * np.finfo(float).eps * scale, 0.0, lam)
        self.eigenvalues, self.eigenvectors = lam, q

    def spectral_function(self, values: np.ndarray) -> np.ndarray:
        """Matrix ``Q diag(values) Q^H``."""
        if self.eigenvectors is None:
            return np.diag(values)
        q = self.eigenvectors
        return (q * values) @ q.conj().T


def build_generator(grid: Grid, kind: str = "laplacian", *, potential=None, multiplier=None,
                    matrix=None) -> Generator:
    """Assemble a generator of one of the supported kinds.

    ``laplacian_plus_potential`` builds ``Laplacian - diag(potential)``;
    ``multiplication`` builds ``diag(multiplier)``.
    """
    n = grid.size
    if kind == "laplacian":
        m = laplacian_matrix(grid)
    elif kind == "laplacian_plus_potential":
        v = _cellwise(potential, n, "potential")
        m = laplacian_matrix(grid) - np.diag(v)
    elif kind == "multiplication":
        m = np.diag(_cellwise(multiplier, n, "multiplier"))
    elif kind == "explicit_hermitian":
        m = np.asarray(matrix)
        if m.shape != (n, n):
            raise ValueError(f"explicit matrix must be {n}x{n}, got {m.shape}")
        if np.abs(m - m.conj().T).max(initial=0.0) >= HERMITIAN_TOL:
            raise ValueError("explicit generator matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    return Generator(grid, kind, m)


def _cellwise(values, n: int, name: str) -> np.ndarray:
    if values is None:
        raise ValueError(f"{name} required")
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    arr = arr.ravel()
    if arr.shape != (n,):
        raise ValueError(f"{name} has {arr.size} entries, grid has {n} cells")
    return arr


@dataclass(frozen=True, eq=False)
class Semigroup:
    generator: Generator
    mode: str = "unitary"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def grid(self) -> Grid:
        return self.generator.grid

    def __call__(self, t: float) -> np.ndarray:
        return propagate(self, t)

    def adjoint(self, t: float) -> np.ndarray:
        return propagate(self, t).conj().T


def propagate(sg: Semigroup, t: float) -> np.ndarray:
    """Dense propagator matrix ``U(t)``."""
    t = float(t)
    lam = sg.generator.eigenvalues
    if sg.mode == "heat":
        if t < 0:
            raise ValueError("heat semigroup is only defined for t >= 0")
        phase = np.exp(t * lam)
    else:
        phase = np.exp(-1j * t * lam)
    return sg.generator.spectral_function(phase)


def semigroup_defect(sg, t: float, s: float) -> float:
    """``||U(t)U(s) - U(t+s)||``; ``sg`` may be any callable ``t -> matrix``."""
    if not callable(sg):
        raise TypeError("expected a Semigroup or an operator-valued function")
    return operator_norm(sg(t) @ sg(s) - sg(t + s))


class RandomSemigroup:
    """A finite parameter set ``E`` mapped to semigroups, built lazily.

    Members are memoized; concurrent first access builds each member once.
    """

    def __init__(self, grid: Grid, parameters: Sequence[float], builder: Callable[[float], Semigroup],
                 name: str = "custom"):
        if len(parameters) == 0:
            raise ValueError("parameter set must be nonempty")
        self.grid = grid
        self.parameters = list(parameters)
        self.name = name
        self._builder = builder
        self._cache: dict[int, Semigroup] = {}
        self._locks = {i: threading.Lock() for i in range(len(self.parameters))}

    def __len__(self) -> int:
        return len(self.parameters)

    def member(self, index: int) -> Semigroup:
        sg = self._cache.get(index)
        if sg is not None:
            return sg
        with self._locks[index]:
            sg = self._cache.get(index)
            if sg is None:
                sg = self._builder(self.parameters[index])
                if sg.grid != self.grid:
                    raise ValueError("family member built on a different grid")
                if self._cache and next(iter(self._cache.values())).mode != sg.mode:
                    raise ValueError("family members must share a mode")
                self._cache[index] = sg
        return sg

    def members(self) -> list[Semigroup]:
        return [self.member(i) for i in range(len(self))]

    @property
    def mode(self) -> str:
        return self.member(0).mode


def mollify(grid: Grid, values: np.ndarray, width: float) -> np.ndarray:
    """Periodic Gaussian smoothing with standard deviation ``width`` (exact in Fourier space)."""
    values = np.asarray(values, dtype=float)
    if width == 0:
        return values.copy()
    shape = (grid.cells_per_axis,) * grid.dim
    k = 2 * np.pi * np.fft.fftfreq(grid.cells_per_axis, d=grid.spacing)
    kk = np.meshgrid(*([k] * grid.dim), indexing="ij")
    k2 = sum(c**2 for c in kk)
    out = np.fft.ifftn(np.fft.fftn(values.reshape(shape)) * np.exp(-0.5 * width**2 * k2))
    return out.real.ravel()


def default_well(grid: Grid, depth: float = 1.0, width: float = 0.1) -> np.ndarray:
    """Periodized Gaussian bump centred in the box."""
    x = grid.coordinates()
    d = x - 0.5 * grid.extent
    return depth * np.exp(-0.5 * np.sum(d**2, axis=1) / width**2)


def _scalar_pair(grid: Grid, eps: float, **_) -> Semigroup:
    return Semigroup(build_generator(grid, "multiplication", multiplier=float(eps)), "unitary")


def _oscillating_multiplier(grid: Grid, n: float, amplitude: float = 1.0, **_) -> Semigroup:
    x = grid.coordinates()[:, 0]
    phi = amplitude * np.sin(2 * np.pi * n * x / grid.extent)
    return Semigroup(build_generator(grid, "multiplication", multiplier=phi), "unitary")


def _regularized_potential(grid: Grid, eps: float, potential=None, mode: str = "unitary",
                           **_) -> Semigroup:
    v = default_well(grid) if potential is None else np.asarray(potential, dtype=float)
    return Semigroup(build_generator(grid, "laplacian_plus_potential",
                                     potential=mollify(grid, v, float(eps))), mode)


FAMILIES = {
    "scalar_pair": _scalar_pair,
    "oscillating_multiplier": _oscillating_multiplier,
    "regularized_potential": _regularized_potential,
}


def make_family(grid: Grid, family: str, parameters: Sequence[float], **options) -> RandomSemigroup:
    """Random semigroup from a built-in family.

    ``scalar_pair``: multiplication by ``eps``, so ``U_eps(t) = exp(-i t eps)``.
    ``oscillating_multiplier``: ``U_n(t) = exp(-i t a sin(2 pi n x / L))``.
    ``regularized_potential``: generator ``Laplacian - V_eps`` where ``V_eps`` is
    ``V`` smoothed at scale ``eps`` (``eps = 0`` gives ``V`` itself).
    """
    try:
        factory = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; known: {sorted(FAMILIES)}") from None
    return RandomSemigroup(grid, parameters, lambda p: factory(grid, p, **options), name=family)
