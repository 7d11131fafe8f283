"""Gray-coded QPSK and 16QAM with unit average symbol energy.

Constellations are stored as index -> point tables where the index is the
symbol's bit pattern read MSB first. Gray coding is per axis, so nearest
neighbors always differ in exactly one bit and bit errors at moderate
noise are dominated by single-bit slips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# 2-bit Gray PAM axis used by 16QAM: levels for bit pairs 00, 01, 10, 11.
_GRAY_PAM4 = {0b00: 3.0, 0b01: 1.0, 0b11: -1.0, 0b10: -3.0}


@dataclass(frozen=True)
class ModulationScheme:
    """One constellation: points[i] is the symbol for bit pattern i."""

    name: str
    bits_per_symbol: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        if pts.shape != (2**self.bits_per_symbol,):
            raise ValueError("constellation size must be 2**bits_per_symbol")
        energy = float(np.mean(np.abs(pts) ** 2))
        if abs(energy - 1.0) > 1e-12:
            raise ValueError(f"{self.name} average symbol energy is {energy}, expected 1")
        object.__setattr__(self, "points", pts)

    @property
    def size(self) -> int:
        return self.points.shape[0]


def _build_qpsk() -> ModulationScheme:
    pts = np.empty(4, dtype=np.complex128)
    for idx in range(4):
        b0 = (idx >> 1) & 1
        b1 = idx & 1
        pts[idx] = complex(1 - 2 * b0, 1 - 2 * b1) / math.sqrt(2.0)
    return ModulationScheme(name="QPSK", bits_per_symbol=2, points=pts)


def _build_16qam() -> ModulationScheme:
    pts = np.empty(16, dtype=np.complex128)
    for idx in range(16):
        i_level = _GRAY_PAM4[(idx >> 2) & 0b11]
        q_level = _GRAY_PAM4[idx & 0b11]
        pts[idx] = complex(i_level, q_level) / math.sqrt(10.0)
    return ModulationScheme(name="16QAM", bits_per_symbol=4, points=pts)


_SCHEMES = {"qpsk": _build_qpsk(), "16qam": _build_16qam()}


def get_scheme(name: str) -> ModulationScheme:
    try:
        return _SCHEMES[name.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown modulation {name!r}; choose from {sorted(_SCHEMES)}"
        ) from None


def bits_to_indices(bits: np.ndarray, bits_per_symbol: int) -> np.ndarray:
    """Pack a flat 0/1 vector into per-symbol indices, MSB first."""
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size % bits_per_symbol != 0:
        raise ValueError(
            f"bit count must be a positive multiple of {bits_per_symbol}, got {bits.size}"
        )
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    groups = bits.reshape(-1, bits_per_symbol).astype(np.int64)
    weights = 2 ** np.arange(bits_per_symbol - 1, -1, -1, dtype=np.int64)
    return groups @ weights


def indices_to_bits(indices: np.ndarray, bits_per_symbol: int) -> np.ndarray:
    """Unpack symbol indices into a flat MSB-first 0/1 vector."""
    indices = np.asarray(indices, dtype=np.int64)
    shifts = np.arange(bits_per_symbol - 1, -1, -1, dtype=np.int64)
    return ((indices[:, None] >> shifts) & 1).reshape(-1)


def modulate(bits: np.ndarray, m: ModulationScheme) -> np.ndarray:
    """Map a 0/1 vector onto constellation symbols."""
    return m.points[bits_to_indices(bits, m.bits_per_symbol)]


def hard_decide(symbols: np.ndarray, m: ModulationScheme) -> np.ndarray:
    """Nearest-point decision; returns constellation indices."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    dist = np.abs(symbols[..., None] - m.points)
    return np.argmin(dist, axis=-1)


def demodulate(symbols: np.ndarray, m: ModulationScheme) -> np.ndarray:
    """Hard-decision demodulation back to a flat bit vector."""
    return indices_to_bits(hard_decide(symbols, m).reshape(-1), m.bits_per_symbol)


def bit_error_table(m: ModulationScheme) -> np.ndarray:
    """(size, size) table of Hamming distances between symbol indices."""
    n = m.size
    table = np.empty((n, n), dtype=np.uint8)
    for a in range(n):
        for b in range(n):
            table[a, b] = (a ^ b).bit_count()
    return table


def is_gray_coded(m: ModulationScheme) -> bool:
    """True when every nearest-neighbor pair differs in exactly one bit."""
    pts = m.points
    dist = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(dist, np.inf)
    min_dist = dist.min()
    table = bit_error_table(m)
    close = dist <= min_dist * (1.0 + 1e-9)
    return bool(np.all(table[close] == 1))
