"""Offline/online pipeline composing the two learned models.

Offline fits one DMD model to the transformed-solution snapshots and one
to the de-transformer snapshots (shared rank). Online evaluates both at
a query time and composes: the predicted de-transformer maps each cell
center into the domain, where the predicted transformed solution is
interpolated. The standard baseline fits the raw solution snapshots
directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dmd
from .mesh import CellField, Grid, VertexField, eval_cell_field, eval_vertex_field


def stack_cell_fields(fields, times):
    """Snapshot matrix from cell fields: component-major columns."""
    data = np.column_stack([f.values.reshape(-1) for f in fields])
    times = np.asarray(times, dtype=np.float64)
    return dmd.SnapshotMatrix(data, float(times[0]), float(times[1] - times[0]))


def stack_vertex_fields(fields, times):
    """Snapshot matrix from vertex fields: component-major columns."""
    data = np.column_stack([f.values.reshape(-1) for f in fields])
    times = np.asarray(times, dtype=np.float64)
    return dmd.SnapshotMatrix(data, float(times[0]), float(times[1] - times[0]))


def unstack_cell(column, grid, components):
    return CellField(grid, column.reshape(components, grid.n_cells))


def unstack_vertex(column, grid):
    return VertexField(grid, column.reshape(grid.dim, grid.n_vertices))


@dataclass(frozen=True)
class TSDMDModel:
    """Paired DMD models for the transformed solution and de-transformer."""

    dmd_g: dmd.DMDModel
    dmd_phi: dmd.DMDModel
    grid: Grid
    components: int
    rank: int
    mode: str = "multilinear"
    phi_offset: np.ndarray | None = None   # temporal mean, when fit centered

    def __post_init__(self):
        if self.dmd_g.n_states != self.components * self.grid.n_cells:
            raise ValueError("transformed-solution model dimension mismatch")
        if self.dmd_phi.n_states != self.grid.dim * self.grid.n_vertices:
            raise ValueError("de-transformer model dimension mismatch")
        if abs(self.dmd_g.dt - self.dmd_phi.dt) > 1e-12 * max(1.0, self.dmd_g.dt):
            raise ValueError("sub-models must share the snapshot time step")
        if self.dmd_g.t0 != self.dmd_phi.t0:
            raise ValueError("sub-models must share the initial time")


def offline(g_mat, phi_mat, n, grid, components, mode="multilinear",
            rank_phi=None, center_phi=False):
    """Fit the two sub-models (shared rank ``n`` unless ``rank_phi`` given).

    ``center_phi=True`` subtracts the de-transformer's temporal mean
    before fitting and restores it at prediction time.
    """
    if g_mat.n_snapshots != phi_mat.n_snapshots:
        raise ValueError("snapshot counts must match")
    if abs(g_mat.dt - phi_mat.dt) > 1e-12 * max(1.0, g_mat.dt):
        raise ValueError("snapshot time steps must match")
    dmd_g = dmd.fit(g_mat, n)
    offset = None
    phi_fit = phi_mat
    if center_phi:
        offset = phi_mat.data.mean(axis=1)
        phi_fit = dmd.SnapshotMatrix(phi_mat.data - offset[:, None],
                                     phi_mat.t0, phi_mat.dt)
    dmd_phi = dmd.fit(phi_fit, n if rank_phi is None else rank_phi)
    return TSDMDModel(dmd_g=dmd_g, dmd_phi=dmd_phi, grid=grid,
                      components=components, rank=n, mode=mode,
                      phi_offset=offset)


def predict_phi(model, t):
    """De-transformer vertex field at time ``t``, clamped to the domain."""
    col = dmd.predict(model.dmd_phi, t)
    if model.phi_offset is not None:
        col = col + model.phi_offset
    vals = col.reshape(model.grid.dim, model.grid.n_vertices)
    lo = np.array([a for a, _ in model.grid.bounds])[:, None]
    hi = np.array([b for _, b in model.grid.bounds])[:, None]
    return VertexField(model.grid, np.clip(vals, lo, hi))


def predict_g(model, t):
    """Transformed-solution cell field at time ``t``."""
    return unstack_cell(dmd.predict(model.dmd_g, t), model.grid, model.components)


def online(model, t):
    """Composed solution field at time ``t``."""
    g_n = predict_g(model, t)
    phi_n = predict_phi(model, t)
    mapped = eval_vertex_field(phi_n, model.grid.cell_centers)
    vals = eval_cell_field(g_n, mapped.T, mode=model.mode)
    return CellField(model.grid, vals)


def baseline(u_mat, n):
    """Standard DMD fit of the raw solution snapshots."""
    return dmd.fit(u_mat, n)


def baseline_field(model, t, grid, components):
    """Baseline prediction reshaped to a cell field."""
    return unstack_cell(dmd.predict(model, t), grid, components)
