"""Plain dynamic mode decomposition.

Truncated SVD of the snapshot matrix, POD-reduced best-fit one-step
operator, eigendecomposition, and a closed-form exponential predictor
that needs no time stepping.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

SIGMA_RATIO_DROP = 1e-12
LAMBDA_DROP = 1e-12
W_COND_MAX = 1e12
GRAM_SIZE_FACTOR = 4


@dataclass(frozen=True)
class SnapshotMatrix:
    """Column store of time-ordered state vectors with uniform time step."""

    data: np.ndarray
    t0: float
    dt: float

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        object.__setattr__(self, "data", data)
        if data.ndim != 2 or data.shape[1] < 2:
            raise ValueError("snapshot matrix needs at least two columns")
        if not self.dt > 0:
            raise ValueError("time step must be positive")
        if not np.all(np.isfinite(data)):
            raise ValueError("snapshot matrix contains non-finite entries")

    @property
    def n_states(self):
        return self.data.shape[0]

    @property
    def n_snapshots(self):
        return self.data.shape[1]

    def times(self):
        return self.t0 + self.dt * np.arange(self.n_snapshots)


@dataclass(frozen=True)
class SVDTriple:
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray


def truncated_svd(S1, n):
    """Leading-``n`` SVD of a matrix, dropping numerically null modes.

    Tall matrices go through the Gram matrix (method of snapshots) with
    a QR polish restoring orthonormality of U; otherwise a dense SVD is
    truncated. Modes with ``sigma/sigma_1 < 1e-12`` are removed (with a
    warning) since their inverses poison the reduced operator.
    """
    S1 = np.asarray(S1, dtype=np.float64)
    N, m = S1.shape
    if not 1 <= n <= min(N, m):
        raise ValueError(f"rank must be in [1, {min(N, m)}], got {n}")
    if N > GRAM_SIZE_FACTOR * m:
        G = S1.T @ S1
        evals, evecs = np.linalg.eigh(G)
        order = np.argsort(evals)[::-1]
        evals = np.clip(evals[order], 0.0, None)
        sigma = np.sqrt(evals[:n])
        keep = sigma > SIGMA_RATIO_DROP * max(sigma[0], np.finfo(float).tiny)
        if not np.all(keep):
            warnings.warn(f"requested rank {n} exceeds numerical rank; "
                          f"keeping {int(keep.sum())} modes", stacklevel=2)
        sigma = sigma[keep]
        V = evecs[:, order[:n]][:, keep]
        U = S1 @ (V / sigma)
        # Gram route loses orthogonality for small sigma; re-orthonormalize
        Q, R = np.linalg.qr(U)
        signs = np.sign(np.diag(R))
        signs[signs == 0] = 1.0
        U = Q * signs
    else:
        Uf, sf, Vtf = np.linalg.svd(S1, full_matrices=False)
        sigma = sf[:n]
        keep = sigma > SIGMA_RATIO_DROP * max(sigma[0], np.finfo(float).tiny)
        if not np.all(keep):
            warnings.warn(f"requested rank {n} exceeds numerical rank; "
                          f"keeping {int(keep.sum())} modes", stacklevel=2)
        sigma = sigma[keep]
        U = Uf[:, :n][:, keep]
        V = Vtf[:n].T[:, keep]
    return SVDTriple(U=U, sigma=sigma, V=V)


@dataclass(frozen=True)
class DMDModel:
    """Equation-free exponential predictor learned from snapshots."""

    U: np.ndarray          # (N, n) POD basis
    W: np.ndarray          # (n, n) complex eigenvectors of the reduced operator
    lam: np.ndarray        # (n,) complex eigenvalues
    omega: np.ndarray      # (n,) continuous frequencies log(lam)/dt
    b: np.ndarray          # (n,) complex amplitudes
    dt: float
    t0: float
    dropped: np.ndarray    # (n,) bool, modes excluded from prediction
    amplitude_warning: bool = False

    @property
    def rank(self):
        return self.U.shape[1]

    @property
    def n_states(self):
        return self.U.shape[0]


def _sorted_eig(A):
    lam, W = np.linalg.eig(A)
    order = np.lexsort((np.angle(lam), -np.abs(lam)))
    return lam[order], W[:, order]


def fit(S, n):
    """Fit a rank-``n`` DMD model to a snapshot matrix.

    SVD over the first K-1 columns, reduced operator
    ``U* S_{2,K} V Sigma^{-1}``, dense eigendecomposition, amplitudes
    from the first snapshot. Modes with eigenvalue magnitude below
    1e-12 are flagged and contribute zero to predictions.
    """
    if S.n_snapshots < 3:
        raise ValueError("need at least three snapshots to fit")
    S1 = S.data[:, :-1]
    S2 = S.data[:, 1:]
    svd = truncated_svd(S1, n)
    U, sigma, V = svd.U, svd.sigma, svd.V
    A_n = U.T @ S2 @ (V / sigma)
    lam, W = _sorted_eig(A_n)

    dropped = np.abs(lam) < LAMBDA_DROP
    omega = np.zeros_like(lam)
    omega[~dropped] = np.log(lam[~dropped]) / S.dt

    rhs = U.T @ S.data[:, 0]
    amplitude_warning = False
    if np.linalg.cond(W) < W_COND_MAX:
        b = np.linalg.solve(W, rhs.astype(complex))
    else:
        b, *_ = np.linalg.lstsq(U @ W, S.data[:, 0].astype(complex),
                                rcond=SIGMA_RATIO_DROP)
        amplitude_warning = True
        warnings.warn("ill-conditioned eigenvector matrix; amplitudes via "
                      "regularized least squares", stacklevel=2)
    return DMDModel(U=U, W=W, lam=lam, omega=omega, b=b, dt=S.dt, t0=S.t0,
                    dropped=dropped, amplitude_warning=amplitude_warning)


def _modal_coeffs(model, t):
    z = np.exp(model.omega * (t - model.t0)) * model.b
    if model.dropped.any():
        z = np.where(model.dropped, 0.0, z)
    return z


def predict_complex(model, t):
    """Complex-valued prediction (before the real-part cast)."""
    return model.U @ (model.W @ _modal_coeffs(model, t))


def predict(model, t):
    """State vector at time ``t``; cost independent of ``t``."""
    return predict_complex(model, t).real


def predict_matrix(model, times):
    """Predictions at many times as columns of an (N, len(times)) array."""
    times = np.asarray(times, dtype=np.float64)
    Z = np.exp(np.outer(model.omega, times - model.t0)) * model.b[:, None]
    if model.dropped.any():
        Z[model.dropped] = 0.0
    return (model.U @ (model.W @ Z)).real
