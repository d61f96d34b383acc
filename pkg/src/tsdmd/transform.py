"""Forward transforms, de-transformers, and Jacobian diagnostics.

The forward spatial transform is ``phi = Id - Psi``. Composing a
snapshot with it yields the transformed snapshot; inverting it at mesh
vertices yields the de-transformer as a vertex field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import CellField, Grid, VertexField, eval_cell_field
from .registration import displacement_eval, displacement_jacobian, min_forward_jacobian

NEWTON_MAX_ITER = 50
NEWTON_RTOL = 1e-10


def forward_eval(field, x):
    """Forward transform ``phi(x) = x - Psi(x)``, clamped to the domain."""
    x = np.asarray(x, dtype=np.float64)
    return field.grid.clamp(x - displacement_eval(field, x))


def transformed_snapshot(u_t, field):
    """Compose a snapshot with the forward transform at cell centers."""
    if u_t.grid != field.grid:
        raise ValueError("snapshot and displacement field must share a grid")
    mapped = forward_eval(field, u_t.grid.cell_centers)
    return CellField(u_t.grid, eval_cell_field(u_t, mapped, mode="multilinear"))


def _newton_sweep(field, targets, x0):
    """Damped Newton for ``phi(x) = target``, vectorized over rows."""
    grid = field.grid
    d = grid.dim
    x = x0.copy()
    resid = (x - displacement_eval(field, x)) - targets
    rnorm = np.linalg.norm(resid, axis=1)
    step_scale = np.ones(x.shape[0])
    for _ in range(NEWTON_MAX_ITER):
        J = np.eye(d) - displacement_jacobian(field, x)
        if d == 1:
            jac = J[:, 0, 0]
            safe = np.where(np.abs(jac) < 1e-14, np.copysign(1e-14, jac), jac)
            delta = resid / safe[:, None]
        else:
            det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            safe = np.where(np.abs(det) < 1e-14, np.copysign(1e-14, det), det)
            delta = np.empty_like(x)
            delta[:, 0] = (J[:, 1, 1] * resid[:, 0] - J[:, 0, 1] * resid[:, 1]) / safe
            delta[:, 1] = (-J[:, 1, 0] * resid[:, 0] + J[:, 0, 0] * resid[:, 1]) / safe
        cand = x - step_scale[:, None] * delta
        cand_resid = (cand - displacement_eval(field, cand)) - targets
        cand_norm = np.linalg.norm(cand_resid, axis=1)
        better = cand_norm <= rnorm
        x[better] = cand[better]
        resid[better] = cand_resid[better]
        rnorm[better] = cand_norm[better]
        step_scale[better] = 1.0
        step_scale[~better] *= 0.5
        if np.all(rnorm <= NEWTON_RTOL * _diameter(grid)):
            break
    return x, rnorm


def _diameter(grid):
    return float(np.linalg.norm(grid.lengths))


def _lattice_fallback(field, target, n_per_axis=33):
    grid = field.grid
    axes = [np.linspace(a, b, n_per_axis) for a, b in grid.bounds]
    if grid.dim == 1:
        pts = axes[0][:, None]
    else:
        X, Y = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([X.ravel(), Y.ravel()])
    resid = (pts - displacement_eval(field, pts)) - target
    order = np.argsort(np.linalg.norm(resid, axis=1), kind="stable")
    best_x, best_r = None, np.inf
    for idx in order[:4]:
        x, r = _newton_sweep(field, target[None, :], pts[idx][None, :].copy())
        if r[0] < best_r:
            best_x, best_r = x[0], r[0]
    return best_x, best_r


def _invert_1d_monotone(field, grid, refine=4, iters=60):
    """First-crossing inverse of a 1D forward map by bracketed bisection.

    The forward map fixes both boundary points, so every vertex target is
    crossed at least once; the smallest root is selected via the running
    maximum of the map on a refined grid, which keeps the branch choice
    consistent across vertices (and time) when the map folds.
    """
    (a, b), = grid.bounds
    targets = grid.vertex_coords[:, 0]
    fine = np.linspace(a, b, refine * grid.cells[0] + 1)
    phi_fine = fine - displacement_eval(field, fine[:, None])[:, 0]
    env = np.maximum.accumulate(phi_fine)
    # bracket: first fine-grid point whose running max reaches the target;
    # hi_idx == 0 means the target is met at the left boundary itself
    hi_idx = np.searchsorted(env, targets, side="left")
    at_left = hi_idx == 0
    hi_idx = np.clip(hi_idx, 1, fine.size - 1)
    lo = np.where(at_left, fine[0], fine[hi_idx - 1])
    hi = np.where(at_left, fine[0], fine[hi_idx])
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        val = mid - displacement_eval(field, mid[:, None])[:, 0]
        take = val < targets
        lo = np.where(take, mid, lo)
        hi = np.where(take, hi, mid)
    x = 0.5 * (lo + hi)
    resid = np.abs((x - displacement_eval(field, x[:, None])[:, 0]) - targets)
    return x[:, None], resid


def invert_at_vertices(field, grid):
    """De-transformer vertex field: solve ``phi(x) = vertex`` per vertex.

    1D uses a monotone first-crossing bisection (robust to folding maps
    and branch-consistent across vertices). 2D uses damped Newton from
    each vertex with a coarse-lattice multi-start fallback. Returns the
    vertex field and a per-vertex flag array marking entries whose
    residual misses the tolerance.
    """
    if field.grid != grid:
        raise ValueError("displacement field and grid must match")
    targets = grid.vertex_coords
    tol = NEWTON_RTOL * _diameter(grid)
    if grid.dim == 1:
        x, rnorm = _invert_1d_monotone(field, grid)
        flags = rnorm > tol
    else:
        x, rnorm = _newton_sweep(field, targets, targets.copy())
        flags = rnorm > tol
        if np.any(flags):
            for i in np.nonzero(flags)[0]:
                xi, ri = _lattice_fallback(field, targets[i])
                if ri < rnorm[i]:
                    x[i] = xi
                    rnorm[i] = ri
            flags = rnorm > tol
    x = grid.clamp(x)
    return VertexField(grid, x.T), flags


def min_jacobian(phi_tilde, grid=None):
    """Minimum Jacobian determinant of a vertex field's interpolant.

    1D: per-element slope (exact). 2D: bilinear-interpolant Jacobian
    sampled at the element center and its four corners.
    """
    grid = phi_tilde.grid if grid is None else grid
    vshape = tuple(c + 1 for c in grid.cells)
    vals = phi_tilde.values.reshape((phi_tilde.components,) + vshape)
    if grid.dim == 1:
        slopes = np.diff(vals[0]) / grid.h[0]
        return float(slopes.min())
    h0, h1 = grid.h
    v = vals
    # edge differences of the bilinear map, per element
    d00 = (v[:, 1:, :-1] - v[:, :-1, :-1]) / h0     # d/dx at y=0 edge
    d01 = (v[:, 1:, 1:] - v[:, :-1, 1:]) / h0       # d/dx at y=1 edge
    d10 = (v[:, :-1, 1:] - v[:, :-1, :-1]) / h1     # d/dy at x=0 edge
    d11 = (v[:, 1:, 1:] - v[:, 1:, :-1]) / h1       # d/dy at x=1 edge
    best = np.inf
    for wx, wy in ((0.5, 0.5), (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)):
        jx = d00 * (1.0 - wy) + d01 * wy            # (2, e0, e1): dphi/dx
        jy = d10 * (1.0 - wx) + d11 * wx            # dphi/dy
        det = jx[0] * jy[1] - jx[1] * jy[0]
        best = min(best, float(det.min()))
    return best


@dataclass(frozen=True)
class TransformedSnapshotSet:
    """Transformed snapshots g and de-transformers phi-tilde per time."""

    grid: Grid
    times: np.ndarray
    g_fields: tuple
    phi_fields: tuple
    newton_flags: np.ndarray
    min_jacobians: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        object.__setattr__(self, "times", times)
        if not (len(self.g_fields) == len(self.phi_fields) == times.size):
            raise ValueError("one g and one phi field per time required")


def decompose(snaps, transforms, jacobian_warn=True):
    """Build transformed snapshots and de-transformers for a trajectory."""
    import warnings

    if not np.array_equal(snaps.times, transforms.times):
        raise ValueError("snapshot and transform times must match")
    g_fields = []
    phi_fields = []
    flags = np.zeros(snaps.times.size, dtype=bool)
    jac_mins = np.empty(snaps.times.size)
    for i, (u_t, field) in enumerate(zip(snaps.fields, transforms.fields)):
        jac_mins[i] = min_forward_jacobian(field)
        if jacobian_warn and jac_mins[i] <= 0.0:
            warnings.warn(f"forward map not a diffeomorphism at t={snaps.times[i]:g} "
                          f"(min det = {jac_mins[i]:.3e})", stacklevel=2)
        g_fields.append(transformed_snapshot(u_t, field))
        phi, vflags = invert_at_vertices(field, snaps.grid)
        phi_fields.append(phi)
        flags[i] = bool(vflags.any())
    return TransformedSnapshotSet(snaps.grid, snaps.times, tuple(g_fields),
                                  tuple(phi_fields), flags, jac_mins)
