"""Error, singular-value, speedup, and error-bound diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dmd import truncated_svd
from .mesh import eval_cell_field, eval_vertex_field


def rel_l1_error(ref, approx):
    """Relative L1 mismatch per component; scalar for scalar fields."""
    if ref.grid != approx.grid:
        raise ValueError("fields must share a grid")
    vol = ref.grid.cell_volume
    num = vol * np.sum(np.abs(ref.values - approx.values), axis=1)
    den = vol * np.sum(np.abs(ref.values), axis=1)
    if np.any(den == 0.0):
        raise ValueError("reference field has zero L1 norm")
    out = num / den
    return float(out[0]) if out.size == 1 else out


@dataclass(frozen=True)
class ErrorReport:
    """Per-sample errors over a time window plus their average."""

    method: str
    rank: int
    window: tuple
    seed: int
    times: np.ndarray
    errors: np.ndarray          # (samples, components)
    averages: np.ndarray        # (components,)

    @property
    def average(self):
        """Average error of the first component."""
        return float(self.averages[0])


def sample_times(window, count, seed):
    t0, t1 = window
    if not t0 < t1:
        raise ValueError("window must have positive length")
    rng = np.random.default_rng(seed)
    return t0 + (t1 - t0) * rng.random(count)


def avg_error(rom_eval, hf_eval, window, count=100, seed=0, method="rom", rank=0):
    """Mean relative L1 error over independent uniform time samples.

    ``hf_eval`` must produce the reference at arbitrary times (fresh
    solves, not snapshot lookups), so extrapolation windows are covered.
    """
    if count < 1:
        raise ValueError("need at least one sample")
    times = sample_times(window, count, seed)
    errors = []
    for t in times:
        e = rel_l1_error(hf_eval(t), rom_eval(t))
        errors.append(np.atleast_1d(e))
    errors = np.array(errors)
    return ErrorReport(method=method, rank=rank, window=tuple(window),
                       seed=seed, times=times, errors=errors,
                       averages=errors.mean(axis=0))


def sv_decay(mat, n_max):
    """Scaled singular values ``sigma_n / sigma_1`` of a snapshot matrix."""
    if n_max > min(mat.data.shape):
        raise ValueError("n_max exceeds matrix dimensions")
    svd = truncated_svd(mat.data, n_max)
    out = np.zeros(n_max)
    out[:svd.sigma.size] = svd.sigma / svd.sigma[0]
    return out


@dataclass(frozen=True)
class TimingReport:
    """Matched wall-clock samples and the resulting speedup factor."""

    hf_seconds: np.ndarray
    rom_seconds: np.ndarray
    speedup: float
    times: np.ndarray = field(default_factory=lambda: np.array([]))


def speedup(hf_seconds, rom_seconds, times=None):
    hf = np.asarray(hf_seconds, dtype=np.float64)
    rom = np.asarray(rom_seconds, dtype=np.float64)
    if hf.size != rom.size or hf.size == 0:
        raise ValueError("matched nonempty sample sets required")
    if np.any(hf <= 0) or np.any(rom <= 0):
        raise ValueError("timings must be positive")
    return TimingReport(hf_seconds=hf, rom_seconds=rom,
                        speedup=float(hf.sum() / rom.sum()),
                        times=np.array([]) if times is None else np.asarray(times))


def bv_seminorm(f):
    """Total variation of a cell field.

    1D: sum of interior jump magnitudes. 2D: axis-wise jumps weighted by
    the transverse cell width. Scalar for scalar fields.
    """
    grid = f.grid
    comps = f.component_grids()
    if grid.dim == 1:
        out = np.sum(np.abs(np.diff(comps, axis=1)), axis=1)
    else:
        h0, h1 = grid.h
        out = (np.sum(np.abs(np.diff(comps, axis=1)), axis=(1, 2)) * h1
               + np.sum(np.abs(np.diff(comps, axis=2)), axis=(1, 2)) * h0)
    return float(out[0]) if out.size == 1 else out


def _l1_norm_diff(a, b, vol):
    return float(vol * np.sum(np.abs(a - b)))


def _vertex_slopes(values, h):
    return np.diff(values) / h


@dataclass(frozen=True)
class BoundReport:
    """Discrete validation of the composition error bound (1D)."""

    delta_g: float
    delta_phi: float
    delta: float
    c1: float
    lhs: float
    bound: float
    bound_domain_scaled: float
    ratio: float
    a1_max: float
    a2_max: float
    holds: bool
    slack: float = 0.10


def check_error_bound(u_fields, g_fields, g_rom_fields, phi_fields,
                      phi_rom_fields, times, slack=0.10):
    """Check ``max_t ||u - g_n(phi_n)||_L1 <= C1*delta + delta^2`` discretely.

    All inputs are per-training-time fields on a shared 1D grid. ``delta``
    is the larger of the transformed-solution L1 error and the
    de-transformer's discrete W^{1,inf} error; ``C1`` adds the solution's
    largest BV seminorm to the de-transformer's largest slope. The domain
    measure enters only the separately reported scaled bound.
    """
    grid = u_fields[0].grid
    if grid.dim != 1:
        raise ValueError("error bound check applies to 1D problems only")
    n_times = len(times)
    if not (len(u_fields) == len(g_fields) == len(g_rom_fields)
            == len(phi_fields) == len(phi_rom_fields) == n_times):
        raise ValueError("one field of each kind per time required")
    vol = grid.cell_volume
    h = grid.h[0]
    centers = grid.cell_centers

    delta_g = 0.0
    delta_phi = 0.0
    c1_bv = 0.0
    c1_grad = 0.0
    lhs = 0.0
    a1_max = 0.0
    a2_max = 0.0
    for u_t, g_t, g_n, p_t, p_n in zip(u_fields, g_fields, g_rom_fields,
                                       phi_fields, phi_rom_fields):
        delta_g = max(delta_g, _l1_norm_diff(g_t.values, g_n.values, vol))
        dv = np.max(np.abs(p_t.values[0] - p_n.values[0]))
        ds = np.max(np.abs(_vertex_slopes(p_t.values[0], h)
                           - _vertex_slopes(p_n.values[0], h)))
        delta_phi = max(delta_phi, dv + ds)

        c1_bv = max(c1_bv, bv_seminorm(u_t))
        c1_grad = max(c1_grad, np.max(np.abs(_vertex_slopes(p_t.values[0], h))))

        mapped_t = eval_vertex_field(p_t, centers).T
        mapped_n = eval_vertex_field(p_n, centers).T
        g_at_t = eval_cell_field(g_t, mapped_t)
        g_at_n = eval_cell_field(g_t, mapped_n)
        gn_at_n = eval_cell_field(g_n, mapped_n)
        a1_max = max(a1_max, _l1_norm_diff(g_at_t, g_at_n, vol))
        a2_max = max(a2_max, _l1_norm_diff(g_at_n, gn_at_n, vol))
        lhs = max(lhs, _l1_norm_diff(u_t.values, gn_at_n, vol))

    delta = max(delta_g, delta_phi)
    c1 = c1_bv + c1_grad
    bound = c1 * delta + delta ** 2
    report = BoundReport(
        delta_g=delta_g, delta_phi=delta_phi, delta=delta, c1=c1,
        lhs=lhs, bound=bound,
        bound_domain_scaled=grid.domain_volume * bound,
        ratio=lhs / bound if bound > 0 else (0.0 if lhs == 0 else np.inf),
        a1_max=a1_max, a2_max=a2_max,
        holds=bool(lhs <= (1.0 + slack) * bound or (lhs == 0.0 and bound == 0.0)),
        slack=slack)
    return report
