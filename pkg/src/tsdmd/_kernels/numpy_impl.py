"""Pure-numpy reference implementations of the hot kernels.

Semantics here define the contract; the numba twin in ``numba_impl``
must agree to rounding error. Interpolation kernels work on uniformly
spaced samples (first sample at ``x0``, spacing ``h``) and extrapolate
with the boundary value beyond the outermost samples.
"""

import numpy as np


def _seg_index(s, m):
    # containing segment index and local weight; degenerate m == 1 collapses
    # to the single sample with zero weight
    if m == 1:
        i0 = np.zeros(s.shape, dtype=np.int64)
        return i0, i0, np.zeros_like(s)
    i0 = np.clip(np.floor(s).astype(np.int64), 0, m - 2)
    w = np.clip(s - i0, 0.0, 1.0)
    return i0, i0 + 1, w


def lin_interp_1d(values, x0, h, q):
    m = values.shape[0]
    s = (q - x0) / h
    i0, i1, w = _seg_index(s, m)
    return values[i0] * (1.0 - w) + values[i1] * w


def lin_interp_1d_vg(values, x0, h, q):
    m = values.shape[0]
    s = (q - x0) / h
    i0, i1, w = _seg_index(s, m)
    val = values[i0] * (1.0 - w) + values[i1] * w
    grad = (values[i1] - values[i0]) / h
    grad = np.where((s >= 0.0) & (s <= m - 1.0), grad, 0.0)
    return val, grad


def lin_interp_2d(values, x0, y0, hx, hy, qx, qy):
    m0, m1 = values.shape
    sx = (qx - x0) / hx
    sy = (qy - y0) / hy
    ix0, ix1, wx = _seg_index(sx, m0)
    iy0, iy1, wy = _seg_index(sy, m1)
    v00 = values[ix0, iy0]
    v10 = values[ix1, iy0]
    v01 = values[ix0, iy1]
    v11 = values[ix1, iy1]
    return (v00 * (1.0 - wx) * (1.0 - wy) + v10 * wx * (1.0 - wy)
            + v01 * (1.0 - wx) * wy + v11 * wx * wy)


def lin_interp_2d_vg(values, x0, y0, hx, hy, qx, qy):
    m0, m1 = values.shape
    sx = (qx - x0) / hx
    sy = (qy - y0) / hy
    ix0, ix1, wx = _seg_index(sx, m0)
    iy0, iy1, wy = _seg_index(sy, m1)
    v00 = values[ix0, iy0]
    v10 = values[ix1, iy0]
    v01 = values[ix0, iy1]
    v11 = values[ix1, iy1]
    val = (v00 * (1.0 - wx) * (1.0 - wy) + v10 * wx * (1.0 - wy)
           + v01 * (1.0 - wx) * wy + v11 * wx * wy)
    gx = ((v10 - v00) * (1.0 - wy) + (v11 - v01) * wy) / hx
    gy = ((v01 - v00) * (1.0 - wx) + (v11 - v10) * wx) / hy
    inx = (sx >= 0.0) & (sx <= m0 - 1.0)
    iny = (sy >= 0.0) & (sy <= m1 - 1.0)
    gx = np.where(inx, gx, 0.0)
    gy = np.where(iny, gy, 0.0)
    return val, gx, gy


def nearest_1d(values, a, h, q):
    m = values.shape[0]
    idx = np.clip(np.floor((q - a) / h).astype(np.int64), 0, m - 1)
    return values[idx]


def nearest_2d(values, a0, a1, h0, h1, q0, q1):
    m0, m1 = values.shape
    i = np.clip(np.floor((q0 - a0) / h0).astype(np.int64), 0, m0 - 1)
    j = np.clip(np.floor((q1 - a1) / h1).astype(np.int64), 0, m1 - 1)
    return values[i, j]


def _limited_slopes(u):
    # van Leer limited slope per cell from neighbour differences along the
    # last axis; harmonic-mean form, zero at extrema
    d = u[..., 1:] - u[..., :-1]
    dm = d[..., :-1]
    dp = d[..., 1:]
    prod = dm * dp
    denom = dm + dp
    safe = np.where(denom == 0.0, 1.0, denom)
    return np.where(prod > 0.0, 2.0 * prod / safe, 0.0)


def _flux_states_1d(uL, uR, flux_code):
    if flux_code == 0:          # linear advection, unit speed
        fL, fR = uL, uR
        alpha = np.ones_like(uL[0])
    elif flux_code == 1:        # 2x2 wave system, f(u) = (u2, u1)
        fL = uL[::-1]
        fR = uR[::-1]
        alpha = np.ones_like(uL[0])
    elif flux_code == 2:        # scalar Burgers along one direction
        fL = 0.5 * uL * uL
        fR = 0.5 * uR * uR
        alpha = np.maximum(np.abs(uL[0]), np.abs(uR[0]))
    else:
        raise ValueError(f"unknown flux code {flux_code}")
    return fL, fR, alpha


def rhs_1d(u_ext, h, flux_code):
    """MUSCL / local Lax-Friedrichs flux divergence, 1D.

    ``u_ext`` has shape (components, n + 4) with two ghost layers per side
    already filled. Returns the semidiscrete right-hand side on the n
    physical cells.
    """
    sigma = _limited_slopes(u_ext)          # (c, n+2), ext cells 1..n+2
    uL = u_ext[:, 1:-2] + 0.5 * sigma[:, :-1]
    uR = u_ext[:, 2:-1] - 0.5 * sigma[:, 1:]
    fL, fR, alpha = _flux_states_1d(uL, uR, flux_code)
    F = 0.5 * (fL + fR) - 0.5 * alpha * (uR - uL)
    return -(F[:, 1:] - F[:, :-1]) / h


def _burgers_face_flux(u):
    # interface fluxes along axis 0; u has shape (m+4, w)
    sigma = _limited_slopes(u.T).T          # (m+2, w)
    uL = u[1:-2] + 0.5 * sigma[:-1]
    uR = u[2:-1] - 0.5 * sigma[1:]
    fL = 0.5 * uL * uL
    fR = 0.5 * uR * uR
    alpha = np.maximum(np.abs(uL), np.abs(uR))
    return 0.5 * (fL + fR) - 0.5 * alpha * (uR - uL)


def rhs_2d_burgers(u_ext, h0, h1):
    """MUSCL / local Lax-Friedrichs flux divergence for 2D Burgers.

    ``u_ext`` has shape (n0 + 4, n1 + 4) with two ghost layers per side.
    """
    Fx = _burgers_face_flux(u_ext[:, 2:-2])         # (n0+1, n1)
    Fy = _burgers_face_flux(u_ext[2:-2, :].T).T     # (n0, n1+1)
    return -(Fx[1:] - Fx[:-1]) / h0 - (Fy[:, 1:] - Fy[:, :-1]) / h1
