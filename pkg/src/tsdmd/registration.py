"""Snapshot registration.

Each training snapshot is aligned to a reference snapshot by a
displacement field drawn from a tensor-Legendre polynomial space whose
basis functions vanish on the domain boundary. The optimal field
minimizes a squared-mismatch matching criterion plus a Laplacian
regularization; a quasi-Newton descent solves each snapshot problem,
warm-started along the trajectory.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Legendre, Polynomial
from scipy.optimize import minimize

from . import _kernels as K
from .mesh import Grid

FD_STEP = 1e-6
MAX_ITER = 200
GRAD_TOL = 1e-8


@lru_cache(maxsize=None)
def _mode_polys(order):
    """Power-basis forms of q_j(s) = l_j(s) s(1-s) and two derivatives.

    l_j is the shifted Legendre polynomial of degree j-1 on [0, 1], so the
    basis includes a pure bump mode (j = 1).
    """
    bump = Polynomial([0.0, 1.0, -1.0])
    out = []
    for degree in range(order):
        leg = Legendre.basis(degree, domain=[0.0, 1.0]).convert(kind=Polynomial)
        q = leg * bump
        out.append((q, q.deriv(1), q.deriv(2)))
    return tuple(out)


def _mode_matrix(s, order, deriv=0):
    polys = _mode_polys(order)
    return np.column_stack([polys[j][deriv](s) for j in range(order)])


def _tensor(BX, BY):
    P = BX.shape[0]
    return (BX[:, :, None] * BY[:, None, :]).reshape(P, -1)


def n_basis(order, dim):
    return order ** dim


def basis_eval(indices, x):
    """Evaluate one displacement basis function at a point of [0,1]^d.

    ``indices`` are 1-based per-axis mode numbers; the value is the
    product over axes of ``l_{j}(x_m) x_m (1 - x_m)``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    indices = (indices,) if np.isscalar(indices) else tuple(indices)
    if len(indices) != x.size:
        raise ValueError("one index per spatial axis required")
    val = 1.0
    for j, xm in zip(indices, x):
        if j < 1:
            raise IndexError(f"basis index must be >= 1, got {j}")
        polys = _mode_polys(int(j))
        val *= polys[int(j) - 1][0](xm)
    return float(val)


@dataclass(frozen=True)
class DisplacementField:
    """Boundary-vanishing polynomial displacement over a grid's domain.

    ``coeffs`` has shape (d, order**d) in normalized [0,1]^d coordinates;
    the physical displacement of component m is scaled by that axis
    length. 2D flat index runs the second-axis mode fastest.
    """

    grid: Grid
    order: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        object.__setattr__(self, "coeffs", coeffs)
        nb = n_basis(self.order, self.grid.dim)
        if coeffs.shape != (self.grid.dim, nb):
            raise ValueError(f"coefficients must have shape {(self.grid.dim, nb)}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("non-finite displacement coefficients")


def zero_field(grid, order):
    return DisplacementField(grid, order, np.zeros((grid.dim, n_basis(order, grid.dim))))


def _normalize(grid, pts):
    lo = np.array([a for a, _ in grid.bounds])
    return (pts - lo) / np.array(grid.lengths)


def _basis_at(grid, order, s):
    """Basis design matrix (P, nb) at normalized points s of shape (P, d)."""
    if grid.dim == 1:
        return _mode_matrix(s[:, 0], order)
    return _tensor(_mode_matrix(s[:, 0], order), _mode_matrix(s[:, 1], order))


def _basis_grad_at(grid, order, s):
    """Per-axis derivative matrices d(basis)/ds_p, each (P, nb)."""
    if grid.dim == 1:
        return (_mode_matrix(s[:, 0], order, 1),)
    Q0, Q1 = _mode_matrix(s[:, 0], order), _mode_matrix(s[:, 1], order)
    D0, D1 = _mode_matrix(s[:, 0], order, 1), _mode_matrix(s[:, 1], order, 1)
    return (_tensor(D0, Q1), _tensor(Q0, D1))


def _basis_lap_at(grid, order, s):
    """Physical-coordinate Laplacian matrix of the basis, (P, nb)."""
    lens = grid.lengths
    if grid.dim == 1:
        return _mode_matrix(s[:, 0], order, 2) / lens[0] ** 2
    Q0, Q1 = _mode_matrix(s[:, 0], order), _mode_matrix(s[:, 1], order)
    S0, S1 = _mode_matrix(s[:, 0], order, 2), _mode_matrix(s[:, 1], order, 2)
    return _tensor(S0, Q1) / lens[0] ** 2 + _tensor(Q0, S1) / lens[1] ** 2


def displacement_eval(field, x):
    """Physical displacement vectors at physical points, shape like ``x``."""
    grid = field.grid
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    s = _normalize(grid, pts)
    B = _basis_at(grid, field.order, s)
    psi = (B @ field.coeffs.T) * np.array(grid.lengths)
    return psi[0] if single else psi


def displacement_jacobian(field, x):
    """Jacobian dPsi_m/dx_p at physical points, shape (P, d, d)."""
    grid = field.grid
    pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
    s = _normalize(grid, pts)
    grads = _basis_grad_at(grid, field.order, s)
    lens = grid.lengths
    d = grid.dim
    out = np.empty((pts.shape[0], d, d))
    for m in range(d):
        for p in range(d):
            out[:, m, p] = (grads[p] @ field.coeffs[m]) * (lens[m] / lens[p])
    return out


def displacement_laplacian(field, x):
    """Vector Laplacian of the displacement at physical points, (P, d)."""
    grid = field.grid
    pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
    s = _normalize(grid, pts)
    L = _basis_lap_at(grid, field.order, s)
    return (L @ field.coeffs.T) * np.array(grid.lengths)


@lru_cache(maxsize=4)
def _center_tables(grid, order):
    s = _normalize(grid, grid.cell_centers)
    B = _basis_at(grid, order, s)
    Lap = _basis_lap_at(grid, order, s)
    Q0 = grid.cell_volume * (Lap.T @ Lap)
    return B, Q0


def min_forward_jacobian(field):
    """Minimum of det(I - grad Psi) over cell centers (diffeomorphism check)."""
    J = displacement_jacobian(field, field.grid.cell_centers)
    if field.grid.dim == 1:
        det = 1.0 - J[:, 0, 0]
    else:
        det = (1.0 - J[:, 0, 0]) * (1.0 - J[:, 1, 1]) - J[:, 0, 1] * J[:, 1, 0]
    return float(det.min())


class _Objective:
    """Matching + regularization functional over flattened coefficients."""

    def __init__(self, u_t, u_ref, order, eps):
        if u_t.grid != u_ref.grid:
            raise ValueError("snapshots must share a grid")
        self.grid = u_t.grid
        self.order = order
        self.eps = float(eps)
        self.lens = np.array(self.grid.lengths)
        self.vol = self.grid.cell_volume
        self.centers = self.grid.cell_centers
        self.B, self.Q0 = _center_tables(self.grid, order)
        self.ut = np.ascontiguousarray(u_t.component_grids())
        self.ref = u_ref.values
        self.dim = self.grid.dim
        self.nb = n_basis(order, self.dim)

    def _phi(self, A):
        psi = (self.B @ A.T) * self.lens
        return self.centers - psi

    def parts(self, a_flat):
        A = a_flat.reshape(self.dim, self.nb)
        phi = self._phi(A)
        m_val = 0.0
        if self.dim == 1:
            (a0, _), = self.grid.bounds
            h0, = self.grid.h
            q = np.ascontiguousarray(phi[:, 0])
            for c in range(self.ut.shape[0]):
                vals = K.lin_interp_1d(self.ut[c], a0 + 0.5 * h0, h0, q)
                r = vals - self.ref[c]
                m_val += self.vol * (r @ r)
        else:
            (a0, _), (a1, _) = self.grid.bounds
            h0, h1 = self.grid.h
            q0 = np.ascontiguousarray(phi[:, 0])
            q1 = np.ascontiguousarray(phi[:, 1])
            for c in range(self.ut.shape[0]):
                vals = K.lin_interp_2d(self.ut[c], a0 + 0.5 * h0, a1 + 0.5 * h1,
                                       h0, h1, q0, q1)
                r = vals - self.ref[c]
                m_val += self.vol * (r @ r)
        r_val = self.eps * sum(
            self.lens[m] ** 2 * (A[m] @ self.Q0 @ A[m]) for m in range(self.dim))
        return m_val, r_val, m_val + r_val

    def total(self, a_flat):
        return self.parts(a_flat)[2]

    def grad(self, a_flat):
        A = a_flat.reshape(self.dim, self.nb)
        phi = self._phi(A)
        gM = np.zeros((self.dim, self.nb))
        if self.dim == 1:
            (a0, _), = self.grid.bounds
            h0, = self.grid.h
            q = np.ascontiguousarray(phi[:, 0])
            w = np.zeros(phi.shape[0])
            for c in range(self.ut.shape[0]):
                vals, g = K.lin_interp_1d_vg(self.ut[c], a0 + 0.5 * h0, h0, q)
                w += (vals - self.ref[c]) * g
            gM[0] = -2.0 * self.vol * self.lens[0] * (self.B.T @ w)
        else:
            (a0, _), (a1, _) = self.grid.bounds
            h0, h1 = self.grid.h
            q0 = np.ascontiguousarray(phi[:, 0])
            q1 = np.ascontiguousarray(phi[:, 1])
            w0 = np.zeros(phi.shape[0])
            w1 = np.zeros(phi.shape[0])
            for c in range(self.ut.shape[0]):
                vals, gx, gy = K.lin_interp_2d_vg(
                    self.ut[c], a0 + 0.5 * h0, a1 + 0.5 * h1, h0, h1, q0, q1)
                r = vals - self.ref[c]
                w0 += r * gx
                w1 += r * gy
            gM[0] = -2.0 * self.vol * self.lens[0] * (self.B.T @ w0)
            gM[1] = -2.0 * self.vol * self.lens[1] * (self.B.T @ w1)
        gR = np.stack([2.0 * self.eps * self.lens[m] ** 2 * (self.Q0 @ A[m])
                       for m in range(self.dim)])
        return (gM + gR).ravel()

    def grad_fd(self, a_flat):
        out = np.empty_like(a_flat)
        for i in range(a_flat.size):
            ap = a_flat.copy()
            ap[i] += FD_STEP
            am = a_flat.copy()
            am[i] -= FD_STEP
            out[i] = (self.total(ap) - self.total(am)) / (2.0 * FD_STEP)
        return out


def objective(field, u_t, u_ref, eps):
    """Matching criterion, regularization, and their sum for one field."""
    obj = _Objective(u_t, u_ref, field.order, eps)
    return obj.parts(field.coeffs.ravel())


@dataclass(frozen=True)
class RegistrationResult:
    field: DisplacementField
    matching: float
    regularization: float
    total: float
    iterations: int
    warned: bool


def register_snapshot(u_t, u_ref, order, eps, init=None, grad="analytic",
                      maxiter=MAX_ITER, gtol=GRAD_TOL):
    """Find the displacement field aligning ``u_t`` to ``u_ref``.

    Quasi-Newton (BFGS) descent from ``init`` (zero field by default);
    the best iterate seen is returned, so the final objective never
    exceeds the initial one. ``grad`` selects the analytic gradient or
    central finite differences.
    """
    grid = u_t.grid
    if init is None:
        init = zero_field(grid, order)
    if init.order != order or init.grid != grid:
        raise ValueError("init field must match grid and order")
    obj = _Objective(u_t, u_ref, order, eps)
    x0 = init.coeffs.ravel().copy()
    best = {"f": obj.total(x0), "x": x0.copy()}

    def fun(a):
        f = obj.total(a)
        if f < best["f"]:
            best["f"] = f
            best["x"] = a.copy()
        return f

    jac = obj.grad if grad == "analytic" else obj.grad_fd
    res = minimize(fun, x0, jac=jac, method="BFGS",
                   options={"maxiter": maxiter, "gtol": gtol})
    if res.fun < best["f"]:
        best["f"] = float(res.fun)
        best["x"] = res.x.copy()
    coeffs = best["x"].reshape(grid.dim, obj.nb)
    m_val, r_val, total = obj.parts(best["x"])
    return RegistrationResult(
        field=DisplacementField(grid, order, coeffs),
        matching=m_val, regularization=r_val, total=total,
        iterations=int(res.nit), warned=not bool(res.success))


@dataclass(frozen=True)
class TransformSet:
    """Displacement fields for every training time plus solve diagnostics."""

    grid: Grid
    order: int
    eps: float
    t_ref: float
    t_ref_requested: float
    times: np.ndarray
    fields: tuple
    matching: np.ndarray
    regularization: np.ndarray
    total: np.ndarray
    warned: np.ndarray
    iterations: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        object.__setattr__(self, "times", times)
        if len(self.fields) != times.size:
            raise ValueError("one displacement field per time required")
        if not times[0] <= self.t_ref <= times[-1]:
            raise ValueError("reference time outside the training window")


def _register_independent(args):
    values, ref_values, grid, order, eps, grad = args
    from .mesh import CellField
    u_t = CellField(grid, values)
    u_ref = CellField(grid, ref_values)
    return register_snapshot(u_t, u_ref, order, eps, grad=grad)


def register_trajectory(snaps, t_ref, order, eps, grad="analytic",
                        independent=False, workers=1):
    """Register every snapshot of a trajectory against the reference.

    The reference is the snapshot nearest ``t_ref``. Solves proceed
    outward from the reference in order of increasing ``|t - t_ref|``,
    each warm-started from the nearest already-solved time;
    ``independent=True`` instead starts every solve from the zero field
    (parallelizable with ``workers``).
    """
    times = snaps.times
    ref_idx = int(np.argmin(np.abs(times - t_ref)))
    u_ref = snaps.fields[ref_idx]
    t_eff = float(times[ref_idx])

    results = [None] * times.size
    if independent:
        args = [(f.values, u_ref.values, snaps.grid, order, eps, grad)
                for f in snaps.fields]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_register_independent, args))
        else:
            results = [_register_independent(a) for a in args]
    else:
        sweep = np.argsort(np.abs(times - t_eff), kind="stable")
        solved = []
        for idx in sweep:
            if solved:
                near = min(solved, key=lambda j: (abs(times[idx] - times[j]), j))
                init = results[near].field
            else:
                init = None
            results[idx] = register_snapshot(snaps.fields[idx], u_ref, order,
                                             eps, init=init, grad=grad)
            solved.append(idx)

    return TransformSet(
        grid=snaps.grid, order=order, eps=float(eps), t_ref=t_eff,
        t_ref_requested=float(t_ref), times=times,
        fields=tuple(r.field for r in results),
        matching=np.array([r.matching for r in results]),
        regularization=np.array([r.regularization for r in results]),
        total=np.array([r.total for r in results]),
        warned=np.array([r.warned for r in results]),
        iterations=np.array([r.iterations for r in results]))


def choose_polynomial_order(snaps, t_ref, eps, max_order, start=2,
                            improvement=0.1, grad="analytic"):
    """Escalate the polynomial order until matching stops improving.

    Registers the snapshot farthest from the reference at increasing
    order, stopping once the best matching value improves by less than
    ``improvement`` (relative) per increment, capped at ``max_order``.
    """
    times = snaps.times
    ref_idx = int(np.argmin(np.abs(times - t_ref)))
    far_idx = int(np.argmax(np.abs(times - times[ref_idx])))
    u_ref = snaps.fields[ref_idx]
    u_far = snaps.fields[far_idx]
    best_m = np.inf
    chosen = start
    for order in range(start, max_order + 1):
        res = register_snapshot(u_far, u_ref, order, eps, grad=grad)
        if best_m != np.inf and res.matching > (1.0 - improvement) * best_m:
            break
        chosen = order
        best_m = min(best_m, res.matching)
    return chosen
