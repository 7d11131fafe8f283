"""Linear MIMO receivers: interference-aware MMSE and zero forcing.

Both take the actual channel realization of the trial. The MMSE filter
additionally takes the interference-plus-noise covariance of that trial
(sum of interferer channel outer products plus the identity for the unit
noise), so it whitens interference instead of treating it as noise of the
wrong color. Identity loading keeps the MMSE system solvable for any
channel; zero forcing rejects channels that are numerically rank
deficient.
"""

from __future__ import annotations

import numpy as np

from .matrixkit import check_hermitian_psd

RANK_RTOL = 1e-10


def mmse_estimate(y: np.ndarray, h: np.ndarray, r: np.ndarray) -> np.ndarray:
    """x_hat = (H^H R^-1 H + I)^-1 H^H R^-1 y for one realization."""
    h = np.asarray(h, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    rh = np.linalg.solve(r, h)
    ry = np.linalg.solve(r, y)
    a = h.conj().T @ rh + np.eye(h.shape[1])
    return np.linalg.solve(a, h.conj().T @ ry)


def zf_estimate(y: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Pseudo-inverse solution; raises on rank-deficient channels."""
    h = np.asarray(h, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    s = np.linalg.svd(h, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= s[0] * RANK_RTOL:
        raise ValueError(
            f"rank deficient channel (singular values span {s[-1]:.3e}..{s[0]:.3e})"
        )
    return np.linalg.pinv(h) @ y


def linear_receive(
    y: np.ndarray,
    h: np.ndarray,
    interference_covariance: np.ndarray | None,
    kind: str = "mmse",
) -> np.ndarray:
    """Equalize one received vector into per-stream symbol estimates.

    kind "mmse" uses the supplied interference-plus-noise covariance
    (identity when None); kind "zf" ignores it and inverts the channel.
    """
    h = np.asarray(h, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    if y.shape[0] != h.shape[0]:
        raise ValueError(f"received vector length {y.shape[0]} does not match {h.shape[0]} rows")
    kind = kind.strip().lower()
    if kind == "zf":
        return zf_estimate(y, h)
    if kind != "mmse":
        raise ValueError(f"receiver kind must be 'mmse' or 'zf', got {kind!r}")
    if interference_covariance is None:
        r = np.eye(h.shape[0], dtype=np.complex128)
    else:
        r = check_hermitian_psd(interference_covariance, "interference_covariance")
        if r.shape != (h.shape[0], h.shape[0]):
            raise ValueError("interference covariance dimension does not match the channel")
    return mmse_estimate(y, h, r)


def interference_plus_noise_covariance(interferer_h: np.ndarray | None, n_r: int) -> np.ndarray:
    """R = H_I H_I^H + I for the trial's interferer realization."""
    r = np.eye(n_r, dtype=np.complex128)
    if interferer_h is not None and interferer_h.size:
        hi = np.asarray(interferer_h, dtype=np.complex128)
        r = r + hi @ hi.conj().T
    return r
