"""Brute-force raster oracle for Minkowski sums in R^d (d <= 3).

Cells live on a global lattice: index ``i`` covers ``[i*h, (i+1)*h)`` in
each coordinate, so grids at dyadic spacings nest and sums are plain index
sums.  A sum raster over-covers the true sum by at most one cell per
operand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .bodies import BoundaryPatch, patch_dense
from .errors import DimensionError, GridMemoryError
from .geometry import MAX_DIM, as_points
from .interval1d import IntervalUnion, as_fraction
from .paths import Path

MAX_CELLS = 2**30
EMPTY_SHRINK = 0.55
# coordinates this many cells below a grid line count as on it, so sets lying
# on a lattice hyperplane do not straddle it through rounding noise
SNAP = 1e-9


@dataclass(frozen=True, eq=False)
class GridSet:
    """Occupancy raster with lower corner cell ``index`` (global lattice)."""

    h: float
    index: tuple
    occ: np.ndarray

    def __post_init__(self):
        occ = np.asarray(self.occ, dtype=bool)
        if not self.h > 0:
            raise ValueError("spacing must be positive")
        if occ.ndim != len(self.index) or not 1 <= occ.ndim <= MAX_DIM:
            raise DimensionError("index and occupancy dimensions disagree")
        occ.setflags(write=False)
        object.__setattr__(self, "occ", occ)
        object.__setattr__(self, "index", tuple(int(i) for i in self.index))

    @classmethod
    def empty(cls, dim: int, h: float) -> GridSet:
        return cls(h, (0,) * dim, np.zeros((0,) * dim, dtype=bool))

    @classmethod
    def from_cells(cls, cells, h: float, dim: int | None = None) -> GridSet:
        cells = np.asarray(cells, dtype=np.int64)
        if cells.size == 0:
            return cls.empty(dim or (cells.shape[1] if cells.ndim == 2 else 1), h)
        lo = cells.min(axis=0)
        shape = cells.max(axis=0) - lo + 1
        _check_size(shape)
        occ = np.zeros(tuple(shape), dtype=bool)
        occ[tuple((cells - lo).T)] = True
        return cls(h, tuple(lo), occ)

    @property
    def dim(self) -> int:
        return self.occ.ndim

    @property
    def dims(self) -> tuple:
        return self.occ.shape

    @property
    def origin(self) -> np.ndarray:
        return np.asarray(self.index, dtype=float) * self.h

    @property
    def count(self) -> int:
        return int(self.occ.sum())

    def cells(self) -> np.ndarray:
        """Global indices of the occupied cells."""
        return np.argwhere(self.occ) + np.asarray(self.index)

    def centers(self) -> np.ndarray:
        return (self.cells() + 0.5) * self.h

    def cropped(self) -> GridSet:
        if not self.count:
            return GridSet.empty(self.dim, self.h)
        nz = np.argwhere(self.occ)
        lo, hi = nz.min(axis=0), nz.max(axis=0) + 1
        sl = tuple(slice(a, b) for a, b in zip(lo, hi))
        return GridSet(self.h, tuple(np.asarray(self.index) + lo), self.occ[sl])

    def translated(self, cells) -> GridSet:
        return GridSet(self.h, tuple(np.asarray(self.index) + np.asarray(cells, dtype=np.int64)), self.occ)

    def __eq__(self, other):
        if not isinstance(other, GridSet):
            return NotImplemented
        a, b = self.cropped(), other.cropped()
        return a.h == b.h and a.index == b.index and a.occ.shape == b.occ.shape and bool(np.array_equal(a.occ, b.occ))

    def issubset(self, other: GridSet) -> bool:
        """Cellwise containment."""
        _same_spacing(self, other)
        mine = self.cells()
        if not len(mine):
            return True
        rel = mine - np.asarray(other.index)
        inside = np.all((rel >= 0) & (rel < np.asarray(other.dims)), axis=1)
        if not inside.all():
            return False
        return bool(other.occ[tuple(rel.T)].all())

    def cell_of(self, x) -> np.ndarray:
        return _cell_index(np.asarray(x, dtype=float), self.h)

    def to_json(self):
        """Flat description with run-length occupancy (C order, first run is empty cells)."""
        flat = self.occ.ravel()
        runs = []
        if flat.size:
            change = np.flatnonzero(np.diff(flat.astype(np.int8))) + 1
            bounds = np.concatenate([[0], change, [flat.size]])
            runs = np.diff(bounds).tolist()
            if flat[0]:
                runs = [0] + runs
        return {"h": self.h, "index": list(self.index), "origin": self.origin.tolist(), "dims": list(self.dims), "rle": runs}

    @classmethod
    def from_json(cls, obj) -> GridSet:
        dims = tuple(obj["dims"])
        flat = np.zeros(int(np.prod(dims)), dtype=bool)
        pos, val = 0, False
        for run in obj["rle"]:
            flat[pos : pos + run] = val
            pos += run
            val = not val
        return cls(float(obj["h"]), tuple(obj["index"]), flat.reshape(dims))

    def to_pgm(self) -> str:
        """ASCII PGM (P2) of a 2D raster; first row is the largest second coordinate."""
        if self.dim != 2:
            raise DimensionError("PGM export needs a 2D grid")
        img = self.occ.T[::-1]
        rows = [" ".join("1" if v else "0" for v in row) for row in img]
        return "\n".join(["P2", f"{img.shape[1]} {img.shape[0]}", "1", *rows]) + "\n"


def _check_size(shape):
    total = int(np.prod([int(s) for s in shape])) if len(shape) else 0
    if total > MAX_CELLS:
        raise GridMemoryError(f"raster needs {total} cells (extents {list(shape)}), cap is {MAX_CELLS}", list(map(int, shape)))


def _same_spacing(a: GridSet, b: GridSet):
    if a.dim != b.dim:
        raise DimensionError("grids differ in dimension")
    if a.h != b.h:
        raise ValueError(f"spacing mismatch: {a.h} vs {b.h}")


# ---------------------------------------------------------------------------
# Rasterization


def _cell_index(pts: np.ndarray, h: float) -> np.ndarray:
    return np.floor(pts / h + SNAP).astype(np.int64)


def _ball_structure(r_cells: float, dim: int) -> np.ndarray:
    k = int(math.floor(r_cells))
    ax = np.arange(-k, k + 1)
    mesh = np.meshgrid(*[ax] * dim, indexing="ij")
    return sum(m * m for m in mesh) <= r_cells * r_cells + 1e-9


def _fatten(grid: GridSet, fatten: float) -> GridSet:
    if fatten <= 0 or not grid.count:
        return grid
    r = fatten / grid.h
    k = int(math.floor(r))
    if k == 0:
        return grid
    padded = np.pad(grid.occ, k)
    grown = ndimage.binary_dilation(padded, structure=_ball_structure(r, grid.dim))
    return GridSet(grid.h, tuple(np.asarray(grid.index) - k), grown).cropped()


def rasterize_points(points, h: float, fatten: float = 0.0) -> GridSet:
    """Cells containing the given points."""
    pts = as_points(points)
    if not len(pts):
        return GridSet.empty(pts.shape[1] if pts.ndim == 2 else 1, h)
    cells = np.unique(_cell_index(pts, h), axis=0)
    return _fatten(GridSet.from_cells(cells, h), fatten)


def _connect(cells: np.ndarray, pts: np.ndarray, h: float) -> np.ndarray:
    """Insert cells so consecutive cells share a face, in crossing order."""
    out = [cells[0]]
    for i in range(1, len(cells)):
        prev, cur = cells[i - 1], cells[i]
        moved = np.flatnonzero(prev != cur)
        if len(moved) > 1:
            p, q = pts[i - 1], pts[i]
            times = []
            for k in moved:
                wall = max(prev[k], cur[k]) * h
                times.append((wall - p[k]) / (q[k] - p[k]))
            # corner crossings tie up to rounding; break ties by axis order
            order = sorted(range(len(moved)), key=lambda j: (round(times[j], 9), moved[j]))
            step = prev.copy()
            for k in moved[order][:-1]:
                step[k] = cur[k]
                out.append(step.copy())
        out.append(cur)
    return np.asarray(out)


def rasterize_polyline(points, h: float, fatten: float = 0.0) -> GridSet:
    """Face-connected cells met by the polyline through ``points``."""
    pts = as_points(points)
    if len(pts) == 0:
        return GridSet.empty(pts.shape[1] if pts.ndim == 2 else 1, h)
    if len(pts) == 1:
        return rasterize_points(pts, h, fatten)
    dense = [pts[:1]]
    for a, b in zip(pts[:-1], pts[1:]):
        m = max(1, int(math.ceil(np.max(np.abs(b - a)) / (0.25 * h))))
        t = np.arange(1, m + 1) / m
        dense.append(a + t[:, None] * (b - a))
    dense = np.vstack(dense)
    cells = _cell_index(dense, h)
    keep = np.ones(len(cells), dtype=bool)
    keep[1:] = np.any(cells[1:] != cells[:-1], axis=1)
    cells, dense = cells[keep], dense[keep]
    if pts.shape[1] > 1:
        cells = _connect(cells, dense, h)
    return _fatten(GridSet.from_cells(np.unique(cells, axis=0), h), fatten)


def rasterize_patch(patch: BoundaryPatch, h: float, fatten: float = 0.0) -> GridSet:
    """Cells met by the boundary patch: polyline in 2D, dense cloud in 3D."""
    pts = patch_dense(patch, 0.5 * h)
    if patch.body.dim == 2:
        return rasterize_polyline(pts, h, fatten)
    return rasterize_points(pts, h, fatten)


def rasterize_intervals(union: IntervalUnion, h) -> GridSet:
    """Exact 1D raster: cell ``i`` is occupied iff ``[i*h, (i+1)*h)`` meets the union."""
    hf = as_fraction(h)
    if not len(union):
        return GridSet.empty(1, float(hf))
    scale_num = hf.denominator
    scale_den = union.den * hf.numerator
    lo = np.asarray([int(v) * scale_num // scale_den for v in union.lo], dtype=np.int64)
    hi = np.asarray([int(v) * scale_num // scale_den for v in union.hi], dtype=np.int64)
    base = int(lo[0])
    size = int(hi[-1]) - base + 1
    _check_size((size,))
    diff = np.zeros(size + 1, dtype=np.int64)
    np.add.at(diff, lo - base, 1)
    np.add.at(diff, hi - base + 1, -1)
    return GridSet(float(hf), (base,), np.cumsum(diff[:-1]) > 0)


def rasterize_product(factors, h) -> GridSet:
    """Raster of a product of interval unions (one per axis)."""
    rows = [rasterize_intervals(f, h) for f in factors]
    if len(rows) > MAX_DIM:
        raise DimensionError("at most three factors")
    if any(not r.count for r in rows):
        return GridSet.empty(len(rows), rows[0].h)
    _check_size([r.dims[0] for r in rows])
    occ = rows[0].occ
    for r in rows[1:]:
        occ = np.multiply.outer(occ, r.occ)
    return GridSet(rows[0].h, tuple(r.index[0] for r in rows), occ.astype(bool))


@dataclass(frozen=True)
class Polyline:
    points: np.ndarray


def rasterize(descriptor, h, fatten: float = 0.0) -> GridSet:
    """Dispatch on the descriptor: patch, path, polyline, interval union,
    tuple of interval unions (product) or an explicit point array."""
    if isinstance(descriptor, BoundaryPatch):
        return rasterize_patch(descriptor, float(h), fatten)
    if isinstance(descriptor, Path):
        return rasterize_polyline(descriptor.points, float(h), fatten)
    if isinstance(descriptor, Polyline):
        return rasterize_polyline(descriptor.points, float(h), fatten)
    if isinstance(descriptor, IntervalUnion):
        return rasterize_intervals(descriptor, h)
    if isinstance(descriptor, (tuple, list)) and descriptor and all(isinstance(f, IntervalUnion) for f in descriptor):
        return rasterize_product(descriptor, h)
    return rasterize_points(descriptor, float(h), fatten)


# ---------------------------------------------------------------------------
# Sums


def minkowski_sum(a: GridSet, b: GridSet, window=None) -> GridSet:
    """Dilation of ``a`` by ``b`` by offset accumulation over the smaller operand.

    ``window`` = ``(lo, hi)`` global cell indices (``hi`` exclusive) restricts
    the output to that box.
    """
    _same_spacing(a, b)
    if not a.count or not b.count:
        return GridSet.empty(a.dim, a.h)
    if b.count > a.count:
        a, b = b, a
    out_lo = np.asarray(a.index) + np.asarray(b.index)
    out_hi = out_lo + np.asarray(a.dims) + np.asarray(b.dims) - 1
    if window is not None:
        out_lo = np.maximum(out_lo, np.asarray(window[0], dtype=np.int64))
        out_hi = np.minimum(out_hi, np.asarray(window[1], dtype=np.int64))
        if np.any(out_hi <= out_lo):
            return GridSet.empty(a.dim, a.h)
    shape = out_hi - out_lo
    _check_size(shape)
    out = np.zeros(tuple(shape), dtype=bool)
    a_lo = np.asarray(a.index)
    a_hi = a_lo + np.asarray(a.dims)
    for off in b.cells():
        # cells i of a land at i + off; keep those inside [out_lo, out_hi)
        lo = np.maximum(a_lo, out_lo - off)
        hi = np.minimum(a_hi, out_hi - off)
        if np.any(hi <= lo):
            continue
        src = tuple(slice(int(x - y), int(z - y)) for x, y, z in zip(lo, a_lo, hi))
        dst = tuple(slice(int(x + o - y), int(z + o - y)) for x, o, y, z in zip(lo, off, out_lo, hi))
        out[dst] |= a.occ[src]
    return GridSet(a.h, tuple(out_lo), out)


def iterate_sumset(a: GridSet, n: int, window=None) -> GridSet:
    """``n``-fold sum by repeated doubling; ``window`` clips only the final sum."""
    if n < 1:
        raise ValueError("n must be at least 1")
    parts = []
    power, k = a, n
    while True:
        if k & 1:
            parts.append(power)
        k >>= 1
        if not k:
            break
        power = minkowski_sum(power, power)
    result = parts[0]
    for i, p in enumerate(parts[1:], start=2):
        result = minkowski_sum(result, p, window if i == len(parts) else None)
    if len(parts) == 1 and window is not None:
        result = _clip(result, window)
    return result


def _clip(g: GridSet, window) -> GridSet:
    lo = np.maximum(np.asarray(g.index), np.asarray(window[0], dtype=np.int64))
    hi = np.minimum(np.asarray(g.index) + np.asarray(g.dims), np.asarray(window[1], dtype=np.int64))
    if np.any(hi <= lo):
        return GridSet.empty(g.dim, g.h)
    sl = tuple(slice(int(x - y), int(z - y)) for x, y, z in zip(lo, g.index, hi))
    return GridSet(g.h, tuple(lo), g.occ[sl])


def window_around(target, radius: float, h: float):
    """Global-index box covering the ball of ``radius`` around ``target``."""
    t = np.asarray(target, dtype=float)
    return np.floor((t - radius) / h).astype(np.int64), np.floor((t + radius) / h).astype(np.int64) + 1


def occupied_measure(a: GridSet) -> float:
    return a.count * a.h**a.dim


# ---------------------------------------------------------------------------
# Interior detection


def eroded(a: GridSet, r_cells: float = 2) -> np.ndarray:
    """Global indices of cells whose whole ``r_cells`` ball neighbourhood is occupied."""
    if not a.count:
        return np.zeros((0, a.dim), dtype=np.int64)
    keep = ndimage.binary_erosion(a.occ, structure=_ball_structure(r_cells, a.dim), border_value=0)
    return np.argwhere(keep) + np.asarray(a.index)


@dataclass
class InteriorVerdict:
    variant: str
    levels: list = field(default_factory=list)
    witness: list | None = None
    witness_h: float | None = None
    contains_target: bool | None = None

    def to_json(self):
        return {
            "variant": self.variant,
            "levels": self.levels,
            "witness": self.witness,
            "witness_h": self.witness_h,
            "contains_target": self.contains_target,
        }


def has_interior(source, r_cells: float = 2, resolutions=None, target=None) -> InteriorVerdict:
    """Decide interior at desk scale across successively halved spacings.

    ``source`` is a list of grids (coarse first) or a callable ``h -> grid``
    evaluated on ``resolutions``.  Interior: every level has an eroded
    survivor and the witnesses nest (each within ``r_cells`` coarse cells of
    the previous one).  Empty: no level has a 2-cell survivor and the
    occupied measure shrinks by about half per level.  Otherwise
    Inconclusive.  With ``target``, witnesses are the survivors nearest it
    and ``contains_target`` says whether every witness block covers it.
    """
    if r_cells < 2:
        raise ValueError("r_cells must be at least 2")
    grids = [source(h) for h in resolutions] if callable(source) else list(source)
    if len(grids) < 2:
        raise ValueError("need at least two resolutions")
    for g0, g1 in zip(grids, grids[1:]):
        if not math.isclose(g1.h, 0.5 * g0.h, rel_tol=1e-12):
            raise ValueError("each resolution must halve the previous one")
    levels = []
    witness, contains, nested = None, True, True
    prev_center, prev_h = None, None
    for g in grids:
        surv = eroded(g, r_cells)
        two = surv if r_cells == 2 else eroded(g, 2)
        level = {"h": g.h, "cells": g.count, "measure": occupied_measure(g), "survivors": int(len(surv)), "two_cell_survivors": int(len(two))}
        if len(surv):
            centers = (surv + 0.5) * g.h
            anchor = target if target is not None else (prev_center if prev_center is not None else centers.mean(axis=0))
            k = int(np.argmin(np.linalg.norm(centers - np.asarray(anchor, dtype=float), axis=1)))
            center = centers[k]
            level["witness"] = center.tolist()
            if prev_center is not None and np.linalg.norm(center - prev_center) > r_cells * prev_h:
                nested = False
            if target is not None:
                contains = contains and bool(np.linalg.norm(center - np.asarray(target, dtype=float)) <= r_cells * g.h)
            prev_center, prev_h = center, g.h
            witness = center.tolist()
        levels.append(level)
    if all(lv["survivors"] for lv in levels) and nested:
        return InteriorVerdict("Interior", levels, witness, grids[-1].h, contains if target is not None else None)
    shrink = all(b["measure"] <= EMPTY_SHRINK * a["measure"] for a, b in zip(levels, levels[1:]))
    if not any(lv["two_cell_survivors"] for lv in levels) and shrink:
        return InteriorVerdict("Empty", levels, None, None, False if target is not None else None)
    return InteriorVerdict("Inconclusive", levels, None, None, False if target is not None else None)


def dyadic_resolutions(h: float, levels: int = 2) -> list[float]:
    return [h / 2**k for k in range(levels)]
