"""Uniform 1D/2D grids and the two discrete function spaces used throughout.

Cell fields are piecewise constant (finite-volume averages); vertex
fields are continuous and multilinear per element. Both evaluate at
arbitrary points, with out-of-domain queries clamped to the domain
closure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels as K


def _as_axis_tuple(value, dim, caster):
    if np.isscalar(value):
        return tuple(caster(value) for _ in range(dim))
    return tuple(caster(v) for v in value)


@dataclass(frozen=True)
class Grid:
    """Uniform tensor-product grid over an axis-aligned box.

    ``bounds`` is a tuple of per-axis ``(a, b)`` intervals and ``cells``
    the per-axis cell counts. 2D data flattens in C order (last axis
    fastest).
    """

    bounds: tuple
    cells: tuple

    def __post_init__(self):
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        cells = tuple(int(c) for c in self.cells)
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "cells", cells)
        if len(bounds) != len(cells) or len(bounds) not in (1, 2):
            raise ValueError("grid must be 1D or 2D with matching bounds/cells")
        for (a, b), c in zip(bounds, cells):
            if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
                raise ValueError(f"degenerate axis interval ({a}, {b})")
            if c < 1:
                raise ValueError(f"cell count must be >= 1, got {c}")

    @property
    def dim(self):
        return len(self.cells)

    @property
    def h(self):
        return tuple((b - a) / c for (a, b), c in zip(self.bounds, self.cells))

    @property
    def lengths(self):
        return tuple(b - a for a, b in self.bounds)

    @property
    def n_cells(self):
        return int(np.prod(self.cells))

    @property
    def n_vertices(self):
        return int(np.prod([c + 1 for c in self.cells]))

    @cached_property
    def axis_centers(self):
        return tuple(a + (np.arange(c) + 0.5) * hm
                     for (a, _), c, hm in zip(self.bounds, self.cells, self.h))

    @cached_property
    def axis_vertices(self):
        return tuple(np.linspace(a, b, c + 1)
                     for (a, b), c in zip(self.bounds, self.cells))

    @cached_property
    def cell_centers(self):
        """All cell centers, shape (n_cells, dim), C-order flattening."""
        if self.dim == 1:
            return self.axis_centers[0][:, None]
        X, Y = np.meshgrid(*self.axis_centers, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])

    @cached_property
    def vertex_coords(self):
        """All vertex coordinates, shape (n_vertices, dim)."""
        if self.dim == 1:
            return self.axis_vertices[0][:, None]
        X, Y = np.meshgrid(*self.axis_vertices, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])

    @property
    def cell_volume(self):
        return float(np.prod(self.h))

    @property
    def domain_volume(self):
        return float(np.prod(self.lengths))

    def clamp(self, points):
        """Clamp points (shape (..., dim)) to the domain closure."""
        lo = np.array([a for a, _ in self.bounds])
        hi = np.array([b for _, b in self.bounds])
        return np.clip(points, lo, hi)


def build_grid(bounds, cells):
    """Construct a :class:`Grid`; scalars are promoted to 1D."""
    if np.isscalar(bounds[0]):
        bounds = (tuple(bounds),)
    cells = _as_axis_tuple(cells, len(bounds), int)
    return Grid(tuple(tuple(b) for b in bounds), cells)


@dataclass(frozen=True)
class CellField:
    """Piecewise-constant field: per-component cell averages, shape (c, N)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        object.__setattr__(self, "values", values)
        if values.shape[1] != self.grid.n_cells:
            raise ValueError(f"expected {self.grid.n_cells} cell values per "
                             f"component, got {values.shape[1]}")
        if not np.all(np.isfinite(values)):
            raise ValueError("cell field contains non-finite values")

    @property
    def components(self):
        return self.values.shape[0]

    def component_grids(self):
        """Per-component values reshaped to the grid's cell layout."""
        return self.values.reshape((self.components,) + self.grid.cells)


@dataclass(frozen=True)
class VertexField:
    """Continuous multilinear field from vertex values, shape (d, n_vertices)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        object.__setattr__(self, "values", values)
        if values.shape[1] != self.grid.n_vertices:
            raise ValueError(f"expected {self.grid.n_vertices} vertex values per "
                             f"component, got {values.shape[1]}")
        if not np.all(np.isfinite(values)):
            raise ValueError("vertex field contains non-finite values")

    @property
    def components(self):
        return self.values.shape[0]


def identity_vertex_field(grid):
    return VertexField(grid, grid.vertex_coords.T.copy())


def _prep_points(grid, x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    if pts.shape[-1] != grid.dim:
        raise ValueError(f"points must have {grid.dim} coordinates")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite evaluation point")
    return grid.clamp(pts), single


def eval_cell_field(field, x, mode="multilinear"):
    """Evaluate a cell field at physical points.

    ``mode="nearest"`` returns the containing cell's average (half-open
    cells, last cell closed). ``mode="multilinear"`` interpolates the
    averages as samples at cell centers, constant beyond the outermost
    centers. Points outside the domain are clamped to its closure.
    Returns shape (c,) for a single point, else (c, P).
    """
    grid = field.grid
    pts, single = _prep_points(grid, x)
    comps = field.component_grids()
    out = np.empty((field.components, pts.shape[0]))
    if grid.dim == 1:
        (a, _), = grid.bounds
        h, = grid.h
        q = np.ascontiguousarray(pts[:, 0])
        for c in range(field.components):
            if mode == "nearest":
                out[c] = K.nearest_1d(comps[c], a, h, q)
            elif mode == "multilinear":
                out[c] = K.lin_interp_1d(comps[c], a + 0.5 * h, h, q)
            else:
                raise ValueError(f"unknown mode {mode!r}")
    else:
        (a0, _), (a1, _) = grid.bounds
        h0, h1 = grid.h
        q0 = np.ascontiguousarray(pts[:, 0])
        q1 = np.ascontiguousarray(pts[:, 1])
        for c in range(field.components):
            if mode == "nearest":
                out[c] = K.nearest_2d(comps[c], a0, a1, h0, h1, q0, q1)
            elif mode == "multilinear":
                out[c] = K.lin_interp_2d(comps[c], a0 + 0.5 * h0, a1 + 0.5 * h1,
                                         h0, h1, q0, q1)
            else:
                raise ValueError(f"unknown mode {mode!r}")
    return out[:, 0] if single else out


def eval_vertex_field(field, x):
    """Multilinear evaluation of a vertex field; exact at vertices.

    Returns shape (d,) for a single point, else (d, P).
    """
    grid = field.grid
    pts, single = _prep_points(grid, x)
    vshape = tuple(c + 1 for c in grid.cells)
    comps = field.values.reshape((field.components,) + vshape)
    out = np.empty((field.components, pts.shape[0]))
    if grid.dim == 1:
        (a, _), = grid.bounds
        h, = grid.h
        q = np.ascontiguousarray(pts[:, 0])
        for c in range(field.components):
            out[c] = K.lin_interp_1d(comps[c], a, h, q)
    else:
        (a0, _), (a1, _) = grid.bounds
        h0, h1 = grid.h
        q0 = np.ascontiguousarray(pts[:, 0])
        q1 = np.ascontiguousarray(pts[:, 1])
        for c in range(field.components):
            out[c] = K.lin_interp_2d(comps[c], a0, a1, h0, h1, q0, q1)
    return out[:, 0] if single else out


# ---------------------------------------------------------------------------
# initial-data descriptors and their projection onto cell averages


@dataclass(frozen=True)
class BoxIndicator:
    """Indicator of an axis-aligned box, 1 inside ``[lo, hi]`` per axis."""

    lo: tuple
    hi: tuple


@dataclass(frozen=True)
class WindowedSine:
    """``(sin(2*pi*(x + phase)) + 1)`` restricted to ``[lo, hi]``, 1D only."""

    phase: float
    lo: float
    hi: float


def _axis_overlap_fraction(centers, h, lo, hi):
    left = centers - 0.5 * h
    right = centers + 0.5 * h
    return np.clip(np.minimum(right, hi) - np.maximum(left, lo), 0.0, None) / h


def _project_piece(piece, grid):
    if isinstance(piece, BoxIndicator):
        lo = _as_axis_tuple(piece.lo, grid.dim, float)
        hi = _as_axis_tuple(piece.hi, grid.dim, float)
        fracs = [_axis_overlap_fraction(grid.axis_centers[m], grid.h[m],
                                        lo[m], hi[m])
                 for m in range(grid.dim)]
        if grid.dim == 1:
            return fracs[0]
        return np.multiply.outer(fracs[0], fracs[1]).ravel()
    if isinstance(piece, WindowedSine):
        if grid.dim != 1:
            raise ValueError("windowed sinusoid applies to 1D grids only")
        centers = grid.axis_centers[0]
        smooth = np.sin(2.0 * np.pi * (centers + piece.phase)) + 1.0
        frac = _axis_overlap_fraction(centers, grid.h[0], piece.lo, piece.hi)
        return smooth * frac
    raise ValueError(f"unsupported initial-data descriptor {type(piece).__name__}")


def project_to_cells(pieces, grid):
    """Project a weighted sum of descriptors onto cell averages.

    ``pieces`` is a sequence of ``(weight, descriptor)`` terms; a bare
    descriptor is also accepted. Indicators use exact per-axis overlap
    fractions; smooth window factors are sampled at cell centers.
    """
    if isinstance(pieces, (BoxIndicator, WindowedSine)):
        pieces = [(1.0, pieces)]
    vals = np.zeros(grid.n_cells)
    for weight, piece in pieces:
        vals += float(weight) * _project_piece(piece, grid)
    return CellField(grid, vals[None, :])
