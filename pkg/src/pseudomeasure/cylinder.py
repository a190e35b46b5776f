"""Cylinder subsets of path space and the ring they generate.

A cylinder ``A^{t_1..t_m}_{B_1..B_m}`` is the set of paths ``xi`` with
``xi(t_j) in B_j``. Canonical cylinders have strictly increasing times;
equal times are merged by intersecting their bases and, unless asked to
retain them, full-grid constraints are dropped as long as one constraint
remains.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .grid import BaseSet, Grid

__all__ = [
    "CylinderSet",
    "RingElement",
    "make_cylinder",
    "intersect",
    "complement",
    "difference",
    "disjointify",
    "are_disjoint",
    "ring_intersect",
    "ring_complement",
    "shift",
    "refine",
    "cylinder_to_dict",
    "cylinder_from_dict",
]

TIME_TOL = 1e-12


@dataclass(frozen=True)
class CylinderSet:
    grid: Grid
    times: tuple[float, ...]
    bases: tuple[BaseSet, ...]

    @property
    def m(self) -> int:
        return len(self.times)

    def is_empty(self) -> bool:
        return self.m == 0

    @classmethod
    def empty(cls, grid: Grid) -> "CylinderSet":
        return cls(grid, (), ())

    def __repr__(self) -> str:
        if self.is_empty():
            return "CylinderSet(empty)"
        inner = ", ".join(f"{t:g}:{b!r}" for t, b in zip(self.times, self.bases))
        return f"CylinderSet({inner})"


def make_cylinder(times: Sequence[float], bases: Sequence[BaseSet], *, retain_full: bool = False,
                  grid: Grid | None = None) -> CylinderSet:
    """Canonical cylinder from possibly unsorted, possibly repeated times."""
    times = [float(t) for t in times]
    bases = list(bases)
    if len(times) != len(bases):
        raise ValueError(f"{len(times)} times but {len(bases)} bases")
    if any(t < 0 for t in times):
        raise ValueError("cylinder times must be nonnegative")
    if grid is None:
        if not bases:
            raise ValueError("grid required for an empty constraint list")
        grid = bases[0].grid
    if any(b.grid != grid for b in bases):
        raise ValueError("bases live on different grids")
    if not times:
        raise ValueError("a cylinder needs at least one time")

    order = sorted(range(len(times)), key=lambda i: times[i])
    merged_t: list[float] = []
    merged_b: list[BaseSet] = []
    for i in order:
        if merged_t and times[i] - merged_t[-1] <= TIME_TOL:
            merged_b[-1] = merged_b[-1] & bases[i]
        else:
            merged_t.append(times[i])
            merged_b.append(bases[i])
    if any(b.is_empty() for b in merged_b):
        return CylinderSet.empty(grid)
    if not retain_full:
        keep = [j for j, b in enumerate(merged_b) if not b.is_full()] or [0]
        merged_t = [merged_t[j] for j in keep]
        merged_b = [merged_b[j] for j in keep]
    return CylinderSet(grid, tuple(merged_t), tuple(merged_b))


def _canon(c: CylinderSet) -> CylinderSet:
    return c if c.is_empty() else make_cylinder(c.times, c.bases)


def intersect(a: CylinderSet, b: CylinderSet) -> CylinderSet:
    if a.grid != b.grid:
        raise ValueError("cylinders live on different grids")
    if a.is_empty() or b.is_empty():
        return CylinderSet.empty(a.grid)
    return make_cylinder(a.times + b.times, a.bases + b.bases)


def are_disjoint(a: CylinderSet, b: CylinderSet) -> bool:
    return intersect(a, b).is_empty()


def shift(c: CylinderSet, s: float) -> CylinderSet:
    if c.is_empty():
        return c
    return CylinderSet(c.grid, tuple(t + s for t in c.times), c.bases)


def refine(c: CylinderSet, times: Iterable[float]) -> CylinderSet:
    """Same path event written on a larger time list (full bases at the new times)."""
    full = BaseSet.full(c.grid)
    extra = [t for t in times if all(abs(t - u) > TIME_TOL for u in c.times)]
    return make_cylinder(list(c.times) + extra, list(c.bases) + [full] * len(extra), retain_full=True)


@dataclass(frozen=True)
class RingElement:
    """Finite disjoint union of cylinders, or its complement when ``complemented``."""

    grid: Grid
    parts: tuple[CylinderSet, ...] = ()
    complemented: bool = False

    @classmethod
    def of(cls, *cylinders: CylinderSet) -> "RingElement":
        if not cylinders:
            raise ValueError("need at least one cylinder")
        grid = cylinders[0].grid
        parts = tuple(c for c in cylinders if not c.is_empty())
        for i, a in enumerate(parts):
            for b in parts[i + 1:]:
                if not are_disjoint(a, b):
                    raise ValueError("ring element parts must be pairwise disjoint")
        return cls(grid, parts, False)

    @classmethod
    def omega(cls, grid: Grid) -> "RingElement":
        return cls(grid, (), True)

    @classmethod
    def empty(cls, grid: Grid) -> "RingElement":
        return cls(grid, (), False)

    def is_empty(self) -> bool:
        return not self.complemented and not self.parts


def complement(a: CylinderSet) -> RingElement:
    """Complement of a cylinder as ``2^m - 1`` disjoint cylinders.

    Each part keeps some constraints and replaces a nonempty subset of them
    by the complementary base; parts with an empty base are omitted.
    """
    if a.is_empty():
        return RingElement.omega(a.grid)
    parts = []
    for flips in product((False, True), repeat=a.m):
        if not any(flips):
            continue
        bases = [~b if f else b for b, f in zip(a.bases, flips)]
        if any(b.is_empty() for b in bases):
            continue
        parts.append(make_cylinder(a.times, bases))
    return RingElement(a.grid, tuple(parts), False)


def difference(x: CylinderSet, p: CylinderSet) -> list[CylinderSet]:
    """``x \\ p`` as at most ``p.m`` disjoint cylinders (peeling one constraint at a time)."""
    if x.is_empty():
        return []
    if p.is_empty():
        return [x]
    pieces = []
    prefix = x
    for t, b in zip(p.times, p.bases):
        out = intersect(prefix, make_cylinder([t], [~b], grid=x.grid))
        if not out.is_empty():
            pieces.append(out)
        prefix = intersect(prefix, make_cylinder([t], [b], grid=x.grid))
        if prefix.is_empty():
            break
    return pieces


def disjointify(sets: Sequence[CylinderSet]) -> RingElement:
    """Rewrite a finite union of cylinders as a disjoint union with the same paths."""
    if not sets:
        raise ValueError("need at least one cylinder")
    grid = sets[0].grid
    parts: list[CylinderSet] = []
    for x in sets:
        if x.grid != grid:
            raise ValueError("cylinders live on different grids")
        pieces = [] if x.is_empty() else [_canon(x)]
        for p in parts:
            pieces = [q for piece in pieces for q in difference(piece, p)]
            if not pieces:
                break
        parts.extend(pieces)
    return RingElement(grid, tuple(parts), False)


def _expand(r: RingElement) -> RingElement | None:
    """Explicit parts for ``r``; ``None`` stands for the whole path space."""
    if not r.complemented:
        return r
    if not r.parts:
        return None
    return ring_complement(RingElement(r.grid, r.parts, False), explicit=True)


def ring_intersect(r: RingElement, s: RingElement) -> RingElement:
    r2, s2 = _expand(r), _expand(s)
    if r2 is None:
        return s
    if s2 is None:
        return r
    parts = []
    for a in r2.parts:
        for b in s2.parts:
            c = intersect(a, b)
            if not c.is_empty():
                parts.append(c)
    return RingElement(r.grid, tuple(parts), False)


def ring_complement(r: RingElement, *, explicit: bool = False) -> RingElement:
    """Complement of a ring element.

    By default this only toggles the ``complemented`` flag. With
    ``explicit=True`` a complemented result is expanded into disjoint parts
    (possible whenever ``r`` has at least one part).
    """
    if r.complemented:
        return RingElement(r.grid, r.parts, False)
    if not explicit or not r.parts:
        return RingElement(r.grid, r.parts, True)
    acc = complement(r.parts[0])
    for p in r.parts[1:]:
        acc = ring_intersect(acc, complement(p))
    return acc


def cylinder_to_dict(c: CylinderSet) -> dict:
    return {"times": list(c.times), "bases": [b.cells.tolist() for b in c.bases]}


def cylinder_from_dict(grid: Grid, data: dict) -> CylinderSet:
    bases = [BaseSet.from_cells(grid, cells) for cells in data["bases"]]
    return make_cylinder(data["times"], bases, retain_full=bool(data.get("retain_full", False)),
                         grid=grid)
