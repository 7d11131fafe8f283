"""Complex-matrix helpers used by the fading-channel model.

Hermitian PSD square roots, standard complex Gaussian sampling, Kronecker
products and block-diagonal direct sums. Matrices are plain complex128
ndarrays; validation helpers enforce the contracts the channel model relies
on (Hermitian within 1e-12, eigenvalues above -1e-10 of the largest).
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

HERMITIAN_RTOL = 1e-12
PSD_EIG_RTOL = 1e-10
SQRT_RTOL = 1e-9


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D complex128 array with all entries finite."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def check_hermitian(m, name: str = "matrix") -> np.ndarray:
    a = as_complex_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    scale = max(float(np.abs(a).max()) if a.size else 0.0, 1.0)
    if a.size and float(np.abs(a - a.conj().T).max()) > HERMITIAN_RTOL * scale:
        raise ValueError(f"{name} is not Hermitian")
    return a


def check_hermitian_psd(m, name: str = "matrix") -> np.ndarray:
    """Validate Hermitian positive semidefiniteness.

    Eigenvalues as low as -1e-10 times the largest eigenvalue are accepted
    (round-off from near-singular correlation matrices); anything lower is
    rejected.
    """
    a = check_hermitian(m, name)
    w = np.linalg.eigvalsh(a)
    wmax = float(w[-1])
    if float(w[0]) < -PSD_EIG_RTOL * max(wmax, 0.0) or wmax < 0.0:
        raise ValueError(f"{name} is not PSD (eigenvalues in [{w[0]:.3e}, {wmax:.3e}])")
    return a


def hermitian_sqrt(m, name: str = "matrix") -> np.ndarray:
    """Hermitian PSD square root S of m, with S @ S = m.

    Uses the eigendecomposition rather than Cholesky so rank-deficient
    inputs work; eigenvalues within -1e-10 * lambda_max of zero are clamped
    to zero.
    """
    a = check_hermitian_psd(m, name)
    w, v = np.linalg.eigh(a)
    s = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def sample_standard_complex_gaussian(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. circularly symmetric complex Gaussian entries, unit variance.

    Entries are (x + iy)/sqrt(2) with x, y standard real normals, so each
    entry has zero mean, E|entry|^2 = 1 and variance 1/2 per component.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"dimensions must be >= 1, got {rows}x{cols}")
    x = rng.standard_normal((rows, cols))
    y = rng.standard_normal((rows, cols))
    return (x + 1j * y) / np.sqrt(2.0)


def direct_sum(blocks) -> np.ndarray:
    """Block-diagonal composition of square matrices.

    Off-block entries are exactly zero; the trace is the sum of the block
    traces.
    """
    mats = [check_hermitian(b, f"block {i}") for i, b in enumerate(blocks)]
    if not mats:
        raise ValueError("direct_sum needs at least one block")
    if len(mats) == 1:
        return mats[0].copy()
    return scipy.linalg.block_diag(*mats)


def kronecker(a, b) -> np.ndarray:
    a = as_complex_matrix(a, "a")
    b = as_complex_matrix(b, "b")
    return np.kron(a, b)
