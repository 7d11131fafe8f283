"""Trial-loop kernels and deterministic per-chunk random draws.

Two interchangeable backends run the Monte Carlo hot loop: a compiled
Cython extension and a vectorized numpy fallback. Both consume identical
pre-drawn random inputs, produced here from a counter-keyed seed sequence,
so a chunk's result is a pure function of (seed, stream, point, chunk)
regardless of backend internals or scheduling.

Backend choice: the extension when it imported, else numpy; the
environment variable MIMOLINK_BACKEND ("numpy", "cython", "auto")
overrides.
"""

from __future__ import annotations

import importlib
import os
from dataclasses import dataclass

import numpy as np

from . import np_backend

_ENV_CHOICE = os.environ.get("MIMOLINK_BACKEND", "auto").strip().lower()
if _ENV_CHOICE not in ("auto", "numpy", "cython"):
    raise ImportError(
        f"MIMOLINK_BACKEND must be 'auto', 'numpy' or 'cython', got {_ENV_CHOICE!r}"
    )

_cy_backend = None
if _ENV_CHOICE in ("auto", "cython"):
    try:
        _cy_backend = importlib.import_module("._cy_backend", __name__)
    except ImportError:
        if _ENV_CHOICE == "cython":
            raise ImportError(
                "MIMOLINK_BACKEND=cython but the compiled extension is not available"
            )
        _cy_backend = None

DEFAULT_BACKEND = "cython" if _cy_backend is not None else "numpy"


def available_backends() -> tuple:
    names = ["numpy"]
    if _cy_backend is not None:
        names.insert(0, "cython")
    return tuple(names)


def get_backend(name: str = "auto"):
    """Return the chunk-runner callable for the named backend."""
    name = (name or "auto").strip().lower()
    if name == "auto":
        name = DEFAULT_BACKEND
    if name == "numpy":
        return np_backend.run_chunk
    if name == "cython":
        if _cy_backend is None:
            raise ValueError("cython backend unavailable (extension not built)")
        return _cy_backend.run_chunk
    raise ValueError(f"unknown backend {name!r}")


@dataclass(frozen=True)
class TrialSetup:
    """Deterministic per-point inputs shared by every chunk.

    mean/rx_sqrt/tx_sqrt describe the serving link (already normalized,
    square roots precomputed); the i-prefixed triple describes the
    aggregated interferers and may be empty (zero interferer columns).
    """

    mean: np.ndarray
    rx_sqrt: np.ndarray
    tx_sqrt: np.ndarray
    imean: np.ndarray
    irx_sqrt: np.ndarray
    itx_sqrt: np.ndarray
    points: np.ndarray
    bit_table: np.ndarray
    use_mmse: bool

    def __post_init__(self):
        for name in ("mean", "rx_sqrt", "tx_sqrt", "imean", "irx_sqrt", "itx_sqrt", "points"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.complex128)
            object.__setattr__(self, name, arr)
        object.__setattr__(
            self, "bit_table", np.ascontiguousarray(self.bit_table, dtype=np.uint8)
        )

    @property
    def n_r(self) -> int:
        return self.mean.shape[0]

    @property
    def n_t(self) -> int:
        return self.mean.shape[1]

    @property
    def n_ti(self) -> int:
        return self.imean.shape[1]

    @property
    def bits_per_trial(self) -> int:
        bits_per_symbol = int(self.points.shape[0] - 1).bit_length()
        return self.n_t * bits_per_symbol


def chunk_generator(
    seed: int, stream_key: int, point_index: int, chunk_index: int
) -> np.random.Generator:
    """Independent generator for one (stream, point, chunk) cell."""
    ss = np.random.SeedSequence((int(seed), int(stream_key), int(point_index), int(chunk_index)))
    return np.random.Generator(np.random.PCG64(ss))


def draw_chunk(rng: np.random.Generator, trials: int, setup: TrialSetup) -> tuple:
    """Draw every random input one chunk consumes, in a fixed order.

    Returns (g, gi, isym, noise, tx_idx): serving fading, interferer
    fading, interferer symbols, receiver noise, transmitted constellation
    indices.
    """
    sqrt2 = np.sqrt(2.0)

    def cgauss(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / sqrt2

    g = cgauss(trials, setup.n_r, setup.n_t)
    gi = cgauss(trials, setup.n_r, setup.n_ti)
    isym = cgauss(trials, setup.n_ti)
    noise = cgauss(trials, setup.n_r)
    tx_idx = rng.integers(0, setup.points.shape[0], size=(trials, setup.n_t), dtype=np.int64)
    return g, gi, isym, noise, tx_idx


def run_chunk(setup: TrialSetup, draws: tuple, backend) -> tuple:
    """Run one chunk through a backend; returns (sum_errors, sum_sq_errors)."""
    g, gi, isym, noise, tx_idx = draws
    return backend(
        setup.mean,
        setup.rx_sqrt,
        setup.tx_sqrt,
        setup.imean,
        setup.irx_sqrt,
        setup.itx_sqrt,
        setup.points,
        setup.bit_table,
        1 if setup.use_mmse else 0,
        g,
        gi,
        isym,
        noise,
        tx_idx,
    )
