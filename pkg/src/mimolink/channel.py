"""Spatially correlated Rician MIMO channels with co-channel interferers.

A link is described by its mean (line-of-sight) matrix, receive and
transmit correlation matrices and a transmit covariance. One realization
is drawn as

    H = H_mean + R_rx^(1/2) @ G @ R_tx^(1/2),   G i.i.d. CN(0, 1),

after the transmit covariance has been absorbed into the mean and the
transmit correlation ("normalization"), so the transmitted symbol vector
can be treated as white. Correlation matrices carry unit diagonals by
convention; all power scaling lives in the transmit covariance and the
mean matrix.

Multiple interferers that share a receive correlation matrix aggregate
into a single wide channel: means concatenate column-wise and the
normalized transmit correlations compose block-diagonally.

A link whose mean power equals its diffuse power has Rician factor one,
and with unit per-antenna transmit power the linear SNR is (K + 1) times
the total transmit power:

>>> spec = build_link_spec(n_r=2, n_t=2, k_factor=1.0, r_rx=0.0,
...                        r_tx=0.0, total_power=2.0)
>>> rician_factor(spec)
1.0
>>> snr(spec)
4.0
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matrixkit import (
    as_complex_matrix,
    check_hermitian_psd,
    hermitian_sqrt,
    direct_sum,
)

DIAG_TOL = 1e-12


def _check_unit_diagonal(m: np.ndarray, name: str) -> None:
    d = np.diagonal(m)
    if np.abs(d - 1.0).max() > DIAG_TOL:
        raise ValueError(f"{name} must have a unit diagonal (correlation convention)")


@dataclass(frozen=True)
class ChannelSpec:
    """Raw statistics of one link, before transmit-covariance absorption.

    mean:    (n_r, n_t) line-of-sight component.
    rx_corr: (n_r, n_r) receive correlation, unit diagonal.
    tx_corr: (n_t, n_t) transmit correlation, unit diagonal.
    tx_cov:  (n_t, n_t) transmit signal covariance in noise-power units.
    """

    mean: np.ndarray
    rx_corr: np.ndarray
    tx_corr: np.ndarray
    tx_cov: np.ndarray

    def __post_init__(self):
        mean = as_complex_matrix(self.mean, "mean")
        rx = check_hermitian_psd(self.rx_corr, "rx_corr")
        tx = check_hermitian_psd(self.tx_corr, "tx_corr")
        cov = check_hermitian_psd(self.tx_cov, "tx_cov")
        n_r, n_t = mean.shape
        if rx.shape != (n_r, n_r):
            raise ValueError(f"rx_corr must be {n_r}x{n_r}, got {rx.shape}")
        if tx.shape != (n_t, n_t):
            raise ValueError(f"tx_corr must be {n_t}x{n_t}, got {tx.shape}")
        if cov.shape != (n_t, n_t):
            raise ValueError(f"tx_cov must be {n_t}x{n_t}, got {cov.shape}")
        _check_unit_diagonal(rx, "rx_corr")
        _check_unit_diagonal(tx, "tx_corr")
        for name, val in (("mean", mean), ("rx_corr", rx), ("tx_corr", tx), ("tx_cov", cov)):
            object.__setattr__(self, name, val)

    @property
    def n_r(self) -> int:
        return self.mean.shape[0]

    @property
    def n_t(self) -> int:
        return self.mean.shape[1]


@dataclass(frozen=True)
class NormalizedChannelSpec:
    """Link statistics after the transmit covariance has been absorbed.

    The transmit covariance of the normalized spec is the identity by
    definition; tx_corr generally no longer has a unit diagonal because it
    carries the transmit power.
    """

    mean: np.ndarray
    rx_corr: np.ndarray
    tx_corr: np.ndarray

    def __post_init__(self):
        mean = as_complex_matrix(self.mean, "mean")
        rx = check_hermitian_psd(self.rx_corr, "rx_corr")
        tx = check_hermitian_psd(self.tx_corr, "tx_corr")
        n_r, n_t = mean.shape
        if rx.shape != (n_r, n_r) or tx.shape != (n_t, n_t):
            raise ValueError("correlation dimensions do not match the mean matrix")
        for name, val in (("mean", mean), ("rx_corr", rx), ("tx_corr", tx)):
            object.__setattr__(self, name, val)

    @property
    def n_r(self) -> int:
        return self.mean.shape[0]

    @property
    def n_t(self) -> int:
        return self.mean.shape[1]


@dataclass(frozen=True)
class InterfererSpec:
    channel: ChannelSpec
    label: str = ""


@dataclass(frozen=True)
class AggregateInterferer:
    """Several interferers folded into one wide normalized channel.

    mean:    (n_r, sum of interferer antenna counts), concatenated means.
    rx_corr: common receive correlation of all interferers.
    tx_corr: block-diagonal, one block per interferer (normalized).
    """

    mean: np.ndarray
    rx_corr: np.ndarray
    tx_corr: np.ndarray
    block_dims: tuple = field(default=())
    labels: tuple = field(default=())

    def __post_init__(self):
        mean = as_complex_matrix(self.mean, "mean")
        rx = check_hermitian_psd(self.rx_corr, "rx_corr")
        tx = check_hermitian_psd(self.tx_corr, "tx_corr")
        if mean.shape[1] != tx.shape[0]:
            raise ValueError("mean column count must equal tx_corr dimension")
        if self.block_dims and sum(self.block_dims) != tx.shape[0]:
            raise ValueError("block_dims do not sum to the tx_corr dimension")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "rx_corr", rx)
        object.__setattr__(self, "tx_corr", tx)
        object.__setattr__(self, "block_dims", tuple(self.block_dims))
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n_r(self) -> int:
        return self.mean.shape[0]

    @property
    def n_t_total(self) -> int:
        return self.mean.shape[1]

    # Alias so sampling helpers treat the aggregate as one wide channel.
    @property
    def n_t(self) -> int:
        return self.mean.shape[1]


def normalize(spec: ChannelSpec) -> NormalizedChannelSpec:
    """Absorb the transmit covariance Q into the mean and transmit correlation.

    mean' = mean @ Q^(1/2) and tx_corr' = Q^(1/2) @ tx_corr @ Q^(1/2), so a
    white unit-power symbol vector through the normalized channel carries
    the same statistics as the covariance-Q vector through the raw one.
    """
    q_sqrt = hermitian_sqrt(spec.tx_cov, "tx_cov")
    tx = q_sqrt @ spec.tx_corr @ q_sqrt
    tx = 0.5 * (tx + tx.conj().T)
    return NormalizedChannelSpec(
        mean=spec.mean @ q_sqrt,
        rx_corr=spec.rx_corr,
        tx_corr=tx,
    )


def sample_channel(
    spec: NormalizedChannelSpec,
    rng: np.random.Generator,
    size: int | None = None,
) -> np.ndarray:
    """Draw channel realizations H = mean + rx^(1/2) G tx^(1/2).

    Returns an (n_r, n_t) matrix, or (size, n_r, n_t) when size is given.
    The entry covariance of the zero-mean part is the Kronecker pairing
    cov(H_ij, conj(H_i'j')) = rx_corr[i, i'] * conj(tx_corr[j, j']).
    """
    rx_sqrt = hermitian_sqrt(spec.rx_corr, "rx_corr")
    tx_sqrt = hermitian_sqrt(spec.tx_corr, "tx_corr")
    n = 1 if size is None else int(size)
    g = (
        rng.standard_normal((n, spec.n_r, spec.n_t))
        + 1j * rng.standard_normal((n, spec.n_r, spec.n_t))
    ) / np.sqrt(2.0)
    h = spec.mean + np.einsum("ij,njk,kl->nil", rx_sqrt, g, tx_sqrt, optimize=True)
    return h[0] if size is None else h


def aggregate(interferers) -> AggregateInterferer:
    """Fold interferer specs into one block-structured normalized channel.

    All interferers must share the receive antenna count and the receive
    correlation matrix; heterogeneous receive correlations would need a
    wideband construction this model does not cover.
    """
    interferers = list(interferers)
    if not interferers:
        raise ValueError("aggregate needs at least one interferer")
    first = interferers[0].channel
    for spec in interferers[1:]:
        ch = spec.channel
        if ch.n_r != first.n_r or np.abs(ch.rx_corr - first.rx_corr).max() > DIAG_TOL:
            raise ValueError("heterogeneous receive correlation unsupported")
    normalized = [normalize(s.channel) for s in interferers]
    return AggregateInterferer(
        mean=np.concatenate([n.mean for n in normalized], axis=1),
        rx_corr=first.rx_corr,
        tx_corr=direct_sum([n.tx_corr for n in normalized]),
        block_dims=tuple(n.n_t for n in normalized),
        labels=tuple(s.label for s in interferers),
    )


def rician_factor(spec: NormalizedChannelSpec) -> float:
    """Ratio of direct (LOS) power to diffuse power.

    K = ||mean||_F^2 / (tr(rx_corr) * tr(tx_corr)).
    """
    diffuse = float(np.trace(spec.rx_corr).real * np.trace(spec.tx_corr).real)
    if diffuse <= 0.0:
        raise ValueError("pure LOS unsupported (zero diffuse power)")
    return float(np.linalg.norm(spec.mean) ** 2) / diffuse


def snr(spec: NormalizedChannelSpec) -> float:
    """Signal-to-noise power ratio, linear.

    SNR = (K + 1) * tr(rx_corr) * tr(tx_corr) / n_r, i.e. the mean received
    signal power per receive antenna over the unit noise power.
    """
    k = rician_factor(spec)
    return (k + 1.0) * float(np.trace(spec.rx_corr).real * np.trace(spec.tx_corr).real) / spec.n_r


def inr(agg: AggregateInterferer, k_i: float) -> float:
    """Interference-to-noise power ratio of the aggregate, linear.

    Same form as snr() with the interferer Rician factor supplied by the
    caller: INR = (K_I + 1) * tr(rx_corr) * tr(tx_corr) / n_r.
    """
    return (
        (k_i + 1.0)
        * float(np.trace(agg.rx_corr).real * np.trace(agg.tx_corr).real)
        / agg.n_r
    )


def received_signal(
    h: np.ndarray,
    tx: np.ndarray,
    interferer_h: np.ndarray | None,
    interferer_tx: np.ndarray | None,
    rng: np.random.Generator,
    noise_scale: float = 1.0,
) -> np.ndarray:
    """Synthesize y = h @ tx + interferer_h @ interferer_tx + z.

    Noise entries are standard complex Gaussian; noise_scale is a test hook
    (0 suppresses the noise term). Leading batch dimensions on h/tx are
    supported and broadcast into the output.
    """
    h = np.asarray(h, dtype=np.complex128)
    tx = np.asarray(tx, dtype=np.complex128)
    if h.shape[-1] != tx.shape[-1]:
        raise ValueError(f"tx length {tx.shape[-1]} does not match channel columns {h.shape[-1]}")
    y = np.einsum("...ij,...j->...i", h, tx)
    if interferer_h is not None:
        hi = np.asarray(interferer_h, dtype=np.complex128)
        si = np.asarray(interferer_tx, dtype=np.complex128)
        if hi.shape[-1] != si.shape[-1]:
            raise ValueError(
                f"interferer_tx length {si.shape[-1]} does not match "
                f"interferer channel columns {hi.shape[-1]}"
            )
        if hi.shape[-2] != h.shape[-2]:
            raise ValueError("interferer channel row count does not match the serving channel")
        y = y + np.einsum("...ij,...j->...i", hi, si)
    z = (
        rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
    ) / np.sqrt(2.0)
    return y + noise_scale * z


def expected_rx_power(
    spec: NormalizedChannelSpec,
    agg: AggregateInterferer | None = None,
) -> float:
    """Closed-form total received power E||y||^2 for white unit-power symbols.

    ||mean||^2 + tr(rx)tr(tx) for the serving link, the analogous pair for
    the aggregated interference, plus n_r for the unit noise.
    """
    total = float(np.linalg.norm(spec.mean) ** 2)
    total += float(np.trace(spec.rx_corr).real * np.trace(spec.tx_corr).real)
    if agg is not None:
        total += float(np.linalg.norm(agg.mean) ** 2)
        total += float(np.trace(agg.rx_corr).real * np.trace(agg.tx_corr).real)
    return total + spec.n_r


def exponential_correlation(n: int, r: float) -> np.ndarray:
    """Single-parameter correlation family: entry (i, j) = r^|i-j|, r in [0, 1)."""
    if not 0.0 <= r < 1.0:
        raise ValueError(f"correlation coefficient must be in [0, 1), got {r}")
    idx = np.arange(n)
    return (r ** np.abs(idx[:, None] - idx[None, :])).astype(np.complex128)


def los_mean(
    k_factor: float,
    rx_corr: np.ndarray,
    tx_corr: np.ndarray,
    aoa_deg: float = 0.0,
    aod_deg: float = 0.0,
) -> np.ndarray:
    """Rank-one line-of-sight mean with an exact Rician factor.

    Steering vectors of a half-wavelength ULA at the given arrival and
    departure angles, scaled so ||mean||_F^2 = k_factor * tr(rx) * tr(tx).
    """
    if k_factor < 0.0:
        raise ValueError(f"k_factor must be >= 0, got {k_factor}")
    rx_corr = check_hermitian_psd(rx_corr, "rx_corr")
    tx_corr = check_hermitian_psd(tx_corr, "tx_corr")
    n_r, n_t = rx_corr.shape[0], tx_corr.shape[0]
    a_r = np.exp(1j * np.pi * np.arange(n_r) * np.sin(np.radians(aoa_deg)))
    a_t = np.exp(1j * np.pi * np.arange(n_t) * np.sin(np.radians(aod_deg)))
    scale = np.sqrt(
        k_factor * np.trace(rx_corr).real * np.trace(tx_corr).real / (n_r * n_t)
    )
    return scale * np.outer(a_r, a_t.conj())


def build_link_spec(
    n_r: int,
    n_t: int,
    k_factor: float,
    r_rx: float,
    r_tx: float,
    total_power: float,
    aoa_deg: float = 0.0,
    aod_deg: float = 0.0,
) -> NormalizedChannelSpec:
    """Normalized link with exponential correlations and isotropic power.

    Transmit covariance is (total_power / n_t) * I (equal power per
    antenna), so snr() of the result equals (k_factor + 1) * total_power.
    """
    rx = exponential_correlation(n_r, r_rx)
    tx = exponential_correlation(n_t, r_tx)
    mean = los_mean(k_factor, rx, tx, aoa_deg=aoa_deg, aod_deg=aod_deg)
    spec = ChannelSpec(
        mean=mean,
        rx_corr=rx,
        tx_corr=tx,
        tx_cov=(total_power / n_t) * np.eye(n_t, dtype=np.complex128),
    )
    return normalize(spec)
