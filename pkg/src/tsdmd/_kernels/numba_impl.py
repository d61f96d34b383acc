"""Numba-jitted twins of the kernels in ``numpy_impl``."""

import numpy as np
from numba import njit


@njit(cache=True)
def lin_interp_1d(values, x0, h, q):
    m = values.shape[0]
    out = np.empty(q.shape[0])
    for p in range(q.shape[0]):
        if m == 1:
            out[p] = values[0]
            continue
        s = (q[p] - x0) / h
        i0 = int(np.floor(s))
        if i0 < 0:
            i0 = 0
        elif i0 > m - 2:
            i0 = m - 2
        w = s - i0
        if w < 0.0:
            w = 0.0
        elif w > 1.0:
            w = 1.0
        out[p] = values[i0] * (1.0 - w) + values[i0 + 1] * w
    return out


@njit(cache=True)
def lin_interp_1d_vg(values, x0, h, q):
    m = values.shape[0]
    out = np.empty(q.shape[0])
    grad = np.empty(q.shape[0])
    for p in range(q.shape[0]):
        if m == 1:
            out[p] = values[0]
            grad[p] = 0.0
            continue
        s = (q[p] - x0) / h
        i0 = int(np.floor(s))
        if i0 < 0:
            i0 = 0
        elif i0 > m - 2:
            i0 = m - 2
        w = s - i0
        if w < 0.0:
            w = 0.0
        elif w > 1.0:
            w = 1.0
        out[p] = values[i0] * (1.0 - w) + values[i0 + 1] * w
        if 0.0 <= s <= m - 1.0:
            grad[p] = (values[i0 + 1] - values[i0]) / h
        else:
            grad[p] = 0.0
    return out, grad


@njit(cache=True)
def lin_interp_2d(values, x0, y0, hx, hy, qx, qy):
    m0, m1 = values.shape
    out = np.empty(qx.shape[0])
    for p in range(qx.shape[0]):
        sx = (qx[p] - x0) / hx
        sy = (qy[p] - y0) / hy
        if m0 == 1:
            ix0 = 0
            ix1 = 0
            wx = 0.0
        else:
            ix0 = int(np.floor(sx))
            if ix0 < 0:
                ix0 = 0
            elif ix0 > m0 - 2:
                ix0 = m0 - 2
            ix1 = ix0 + 1
            wx = sx - ix0
            if wx < 0.0:
                wx = 0.0
            elif wx > 1.0:
                wx = 1.0
        if m1 == 1:
            iy0 = 0
            iy1 = 0
            wy = 0.0
        else:
            iy0 = int(np.floor(sy))
            if iy0 < 0:
                iy0 = 0
            elif iy0 > m1 - 2:
                iy0 = m1 - 2
            iy1 = iy0 + 1
            wy = sy - iy0
            if wy < 0.0:
                wy = 0.0
            elif wy > 1.0:
                wy = 1.0
        v00 = values[ix0, iy0]
        v10 = values[ix1, iy0]
        v01 = values[ix0, iy1]
        v11 = values[ix1, iy1]
        out[p] = (v00 * (1.0 - wx) * (1.0 - wy) + v10 * wx * (1.0 - wy)
                  + v01 * (1.0 - wx) * wy + v11 * wx * wy)
    return out


@njit(cache=True)
def lin_interp_2d_vg(values, x0, y0, hx, hy, qx, qy):
    m0, m1 = values.shape
    out = np.empty(qx.shape[0])
    gx = np.empty(qx.shape[0])
    gy = np.empty(qx.shape[0])
    for p in range(qx.shape[0]):
        sx = (qx[p] - x0) / hx
        sy = (qy[p] - y0) / hy
        if m0 == 1:
            ix0 = 0
            ix1 = 0
            wx = 0.0
        else:
            ix0 = int(np.floor(sx))
            if ix0 < 0:
                ix0 = 0
            elif ix0 > m0 - 2:
                ix0 = m0 - 2
            ix1 = ix0 + 1
            wx = sx - ix0
            if wx < 0.0:
                wx = 0.0
            elif wx > 1.0:
                wx = 1.0
        if m1 == 1:
            iy0 = 0
            iy1 = 0
            wy = 0.0
        else:
            iy0 = int(np.floor(sy))
            if iy0 < 0:
                iy0 = 0
            elif iy0 > m1 - 2:
                iy0 = m1 - 2
            iy1 = iy0 + 1
            wy = sy - iy0
            if wy < 0.0:
                wy = 0.0
            elif wy > 1.0:
                wy = 1.0
        v00 = values[ix0, iy0]
        v10 = values[ix1, iy0]
        v01 = values[ix0, iy1]
        v11 = values[ix1, iy1]
        out[p] = (v00 * (1.0 - wx) * (1.0 - wy) + v10 * wx * (1.0 - wy)
                  + v01 * (1.0 - wx) * wy + v11 * wx * wy)
        if 0.0 <= sx <= m0 - 1.0:
            gx[p] = ((v10 - v00) * (1.0 - wy) + (v11 - v01) * wy) / hx
        else:
            gx[p] = 0.0
        if 0.0 <= sy <= m1 - 1.0:
            gy[p] = ((v01 - v00) * (1.0 - wx) + (v11 - v10) * wx) / hy
        else:
            gy[p] = 0.0
    return out, gx, gy


@njit(cache=True)
def nearest_1d(values, a, h, q):
    m = values.shape[0]
    out = np.empty(q.shape[0])
    for p in range(q.shape[0]):
        i = int(np.floor((q[p] - a) / h))
        if i < 0:
            i = 0
        elif i > m - 1:
            i = m - 1
        out[p] = values[i]
    return out


@njit(cache=True)
def nearest_2d(values, a0, a1, h0, h1, q0, q1):
    m0, m1 = values.shape
    out = np.empty(q0.shape[0])
    for p in range(q0.shape[0]):
        i = int(np.floor((q0[p] - a0) / h0))
        if i < 0:
            i = 0
        elif i > m0 - 1:
            i = m0 - 1
        j = int(np.floor((q1[p] - a1) / h1))
        if j < 0:
            j = 0
        elif j > m1 - 1:
            j = m1 - 1
        out[p] = values[i, j]
    return out


@njit(cache=True, inline="always")
def _slope(dm, dp):
    prod = dm * dp
    if prod > 0.0:
        return 2.0 * prod / (dm + dp)
    return 0.0


@njit(cache=True)
def rhs_1d(u_ext, h, flux_code):
    c, ntot = u_ext.shape
    n = ntot - 4
    out = np.empty((c, n))
    F = np.empty((c, n + 1))
    for comp in range(c):
        for k in range(n + 1):
            jL = k + 1
            jR = k + 2
            sL = _slope(u_ext[comp, jL] - u_ext[comp, jL - 1],
                        u_ext[comp, jL + 1] - u_ext[comp, jL])
            sR = _slope(u_ext[comp, jR] - u_ext[comp, jR - 1],
                        u_ext[comp, jR + 1] - u_ext[comp, jR])
            uL = u_ext[comp, jL] + 0.5 * sL
            uR = u_ext[comp, jR] - 0.5 * sR
            if flux_code == 0:
                fL = uL
                fR = uR
                alpha = 1.0
            elif flux_code == 2:
                fL = 0.5 * uL * uL
                fR = 0.5 * uR * uR
                alpha = max(abs(uL), abs(uR))
            else:
                # wave system couples components; overwritten below
                fL = 0.0
                fR = 0.0
                alpha = 1.0
            F[comp, k] = 0.5 * (fL + fR) - 0.5 * alpha * (uR - uL)
    if flux_code == 1:
        # 2x2 wave system: f(u) = (u2, u1), unit wavespeed
        for k in range(n + 1):
            jL = k + 1
            jR = k + 2
            uL0 = u_ext[0, jL] + 0.5 * _slope(u_ext[0, jL] - u_ext[0, jL - 1],
                                              u_ext[0, jL + 1] - u_ext[0, jL])
            uL1 = u_ext[1, jL] + 0.5 * _slope(u_ext[1, jL] - u_ext[1, jL - 1],
                                              u_ext[1, jL + 1] - u_ext[1, jL])
            uR0 = u_ext[0, jR] - 0.5 * _slope(u_ext[0, jR] - u_ext[0, jR - 1],
                                              u_ext[0, jR + 1] - u_ext[0, jR])
            uR1 = u_ext[1, jR] - 0.5 * _slope(u_ext[1, jR] - u_ext[1, jR - 1],
                                              u_ext[1, jR + 1] - u_ext[1, jR])
            F[0, k] = 0.5 * (uL1 + uR1) - 0.5 * (uR0 - uL0)
            F[1, k] = 0.5 * (uL0 + uR0) - 0.5 * (uR1 - uL1)
    for comp in range(c):
        for i in range(n):
            out[comp, i] = -(F[comp, i + 1] - F[comp, i]) / h
    return out


@njit(cache=True)
def rhs_2d_burgers(u_ext, h0, h1):
    n0 = u_ext.shape[0] - 4
    n1 = u_ext.shape[1] - 4
    out = np.empty((n0, n1))
    # x-direction sweeps
    for j in range(n1):
        jj = j + 2
        Fprev = 0.0
        for k in range(n0 + 1):
            iL = k + 1
            iR = k + 2
            sL = _slope(u_ext[iL, jj] - u_ext[iL - 1, jj],
                        u_ext[iL + 1, jj] - u_ext[iL, jj])
            sR = _slope(u_ext[iR, jj] - u_ext[iR - 1, jj],
                        u_ext[iR + 1, jj] - u_ext[iR, jj])
            uL = u_ext[iL, jj] + 0.5 * sL
            uR = u_ext[iR, jj] - 0.5 * sR
            alpha = max(abs(uL), abs(uR))
            Fk = 0.5 * (0.5 * uL * uL + 0.5 * uR * uR) - 0.5 * alpha * (uR - uL)
            if k > 0:
                out[k - 1, j] = -(Fk - Fprev) / h0
            Fprev = Fk
    # y-direction sweeps
    for i in range(n0):
        ii = i + 2
        Fprev = 0.0
        for k in range(n1 + 1):
            jL = k + 1
            jR = k + 2
            sL = _slope(u_ext[ii, jL] - u_ext[ii, jL - 1],
                        u_ext[ii, jL + 1] - u_ext[ii, jL])
            sR = _slope(u_ext[ii, jR] - u_ext[ii, jR - 1],
                        u_ext[ii, jR + 1] - u_ext[ii, jR])
            uL = u_ext[ii, jL] + 0.5 * sL
            uR = u_ext[ii, jR] - 0.5 * sR
            alpha = max(abs(uL), abs(uR))
            Fk = 0.5 * (0.5 * uL * uL + 0.5 * uR * uR) - 0.5 * alpha * (uR - uL)
            if k > 0:
                out[i, k - 1] -= (Fk - Fprev) / h1
            Fprev = Fk
    return out
