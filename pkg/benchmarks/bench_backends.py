"""Compare the compiled and numpy trial-loop backends on identical draws.

Both backends consume the same pre-drawn random inputs, so the comparison
is pure compute; results are asserted equal before timing is reported.

Usage: python benchmarks/bench_backends.py [--trials N] [--repeat R]
"""

import argparse
import time

from mimolink import simulate
from mimolink._kernels import (
    available_backends,
    chunk_generator,
    draw_chunk,
    get_backend,
    run_chunk,
)

SCENARIOS = (
    ("2x2 mmse, 10 interferers", dict(n_t=2, n_r=2, n_int=10, receiver="mmse")),
    ("4x4 mmse, 10 interferers", dict(n_t=4, n_r=4, n_int=10, receiver="mmse")),
    ("2x2 zf, no interference", dict(n_t=2, n_r=2, n_int=0, receiver="zf")),
    ("4x4 mmse, 16qam", dict(n_t=4, n_r=4, n_int=4, receiver="mmse",
                             modulation="16qam")),
)


def build_setup(n_t, n_r, n_int, receiver, modulation="qpsk"):
    cfg = simulate.SimConfig(
        n_t=n_t,
        n_r=n_r,
        snr_grid_db=(10.0,),
        r_rx=0.5,
        r_tx=0.3,
        modulation=modulation,
        receiver=receiver,
        interferer_inrs_db=(3.0,) * n_int,
    )
    return simulate.build_point_setup(cfg, 10.0)


def time_backend(backend, setup, draws, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = run_chunk(setup, draws, backend)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=16384,
                        help="trials per timed chunk (default 16384)")
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions, best taken (default 5)")
    args = parser.parse_args()

    names = available_backends()
    print(f"backends: {', '.join(names)}; {args.trials} trials, best of {args.repeat}")
    header = f"{'scenario':28s}" + "".join(f"{n:>14s}" for n in names)
    if len(names) > 1:
        header += f"{'speedup':>10s}"
    print(header)

    for label, params in SCENARIOS:
        setup = build_setup(**params)
        draws = draw_chunk(chunk_generator(0, 0, 0, 0), args.trials, setup)
        times = {}
        results = {}
        for name in names:
            times[name], results[name] = time_backend(
                get_backend(name), setup, draws, args.repeat
            )
        assert len(set(results.values())) == 1, f"backend mismatch on {label}: {results}"
        row = f"{label:28s}"
        for name in names:
            row += f"{args.trials / times[name]:>11.0f}/s "
        if len(names) > 1:
            row += f"{times['numpy'] / times['cython']:>9.2f}x"
        print(row)


if __name__ == "__main__":
    main()
