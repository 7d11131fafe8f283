"""Vectorized numpy implementation of the Monte Carlo trial chunk.

All trials in a chunk are processed as one batch: channel synthesis by
broadcast matrix products, equalization by batched linear solves, hard
decisions by nearest constellation point. Returns integer error
accumulators so results merge exactly across chunks.
"""

from __future__ import annotations

import numpy as np


def run_chunk(
    mean,
    rx_sqrt,
    tx_sqrt,
    imean,
    irx_sqrt,
    itx_sqrt,
    points,
    bit_table,
    use_mmse,
    g,
    gi,
    isym,
    noise,
    tx_idx,
):
    """Run one batch of trials; returns (sum of bit errors, sum of squares).

    Per trial: realize the serving and interferer channels from the
    pre-drawn fading, transmit the indexed constellation symbols, add the
    interference and noise, equalize (interference-aware MMSE or zero
    forcing via the normal equations), decide, and count bit errors
    against the transmitted indices.
    """
    trials, n_r, n_t = g.shape
    n_ti = gi.shape[2]

    h = mean + rx_sqrt @ g @ tx_sqrt
    x = points[tx_idx]
    y = (h @ x[..., None])[..., 0] + noise

    if n_ti:
        hi = imean + irx_sqrt @ gi @ itx_sqrt
        y = y + (hi @ isym[..., None])[..., 0]
    else:
        hi = None

    hc = h.conj().transpose(0, 2, 1)
    if use_mmse:
        if hi is not None:
            r = np.eye(n_r, dtype=np.complex128) + hi @ hi.conj().transpose(0, 2, 1)
            rh = np.linalg.solve(r, h)
            ry = np.linalg.solve(r, y[..., None])
        else:
            rh = h
            ry = y[..., None]
        a = hc @ rh + np.eye(n_t, dtype=np.complex128)
        b = hc @ ry
    else:
        a = hc @ h
        b = hc @ y[..., None]
    x_hat = np.linalg.solve(a, b)[..., 0]

    rx_idx = np.argmin(np.abs(x_hat[..., None] - points), axis=-1)
    errs = bit_table[tx_idx, rx_idx].sum(axis=1, dtype=np.int64)
    return int(errs.sum()), int(np.sum(errs * errs))
