"""Command-line entry point.

Four commands share one configuration file: `pattern` tabulates the
sector antenna cuts, `network` turns the site layout into an interference
report, `simulate` runs the Monte Carlo BER sweeps, and `validate` runs
the built-in oracle suite. Every command writes a JSON manifest next to
its outputs; pointing --config at a manifest reproduces the run.

Exit codes: 0 success, 1 validation or consistency failure, 2
configuration error, 3 simulate completed but left saturated points.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import antenna, channel, network, simulate
from .config import (
    ConfigError,
    antenna_pattern,
    load_config,
    parse_antenna_configs,
    path_loss_model,
    sim_config,
)
from .matrixkit import kronecker
from .simulate import SimConfig, StoppingRule


def _write_manifest(out_dir: Path, command: str, cfg: dict, outputs, started: float) -> Path:
    manifest = {
        "command": command,
        "seed": cfg["sim"]["seed"],
        "outputs": [str(name) for name in outputs],
        "duration_s": round(time.time() - started, 3),
        "config": cfg,
    }
    path = out_dir / f"manifest_{command}.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def cmd_pattern(cfg: dict, out_dir: Path) -> int:
    started = time.time()
    pat = antenna_pattern(cfg)
    cut = cfg["antenna"]["cut"]
    step = cfg["antenna"]["step_deg"]
    try:
        table = antenna.sample_pattern(pat, cut, step)
    except ValueError as exc:
        raise ConfigError(f"antenna.cut/step_deg: {exc}") from exc
    name = f"pattern_{cut}.csv"
    antenna.write_pattern_csv(table, out_dir / name)
    peak_row = table[np.argmax(table[:, 1])]
    print(f"wrote {name} ({table.shape[0]} rows)")
    print(f"peak gain {peak_row[1]:.4f} dBi at {peak_row[0]:+.1f} deg")
    if math.isfinite(pat.sidelobe_level_dbi):
        print(f"upper sidelobe level {pat.sidelobe_level_dbi:.4f} dBi")
    else:
        print("upper sidelobe disabled")
    _write_manifest(out_dir, "pattern", cfg, [name], started)
    return 0


def _network_profile(cfg: dict):
    net = cfg["network"]
    layout = (
        network.load_layout(net["layout"]) if net["layout"] else network.bundled_layout()
    )
    assignment = network.assign_segments(layout)
    serving = layout.sector(net["serving_site"], net["serving_azimuth_deg"])
    entries = network.interference_profile(
        layout,
        assignment,
        antenna_pattern(cfg),
        path_loss_model(cfg),
        serving,
        (net["ms_x_km"], net["ms_y_km"]),
        net["tx_power_dbm"],
        noise_floor_dbm=net["noise_floor_dbm"],
        bs_height_m=net["bs_height_m"],
        ms_height_m=net["ms_height_m"],
    )
    return layout, serving, entries


def cmd_network(cfg: dict, out_dir: Path) -> int:
    started = time.time()
    layout, serving, entries = _network_profile(cfg)
    name = "interference.csv"
    network.write_interference_csv(entries, out_dir / name)
    print(f"layout: {len(layout.site_ids)} sites, serving sector {serving.name}")
    print(f"wrote {name} ({len(entries)} co-channel interferers)")
    if entries:
        top = entries[0]
        print(
            f"strongest interferer {top.sector.name}: rx {top.rx_dbm:.2f} dBm, "
            f"inr {top.inr_db:.2f} dB"
        )
        total_inr = sum(e.inr for e in entries)
        print(f"aggregate inr {10.0 * math.log10(total_inr):.2f} dB")
    _write_manifest(out_dir, "network", cfg, [name], started)
    return 0


def cmd_simulate(cfg: dict, out_dir: Path, workers: int) -> int:
    started = time.time()
    inrs_override = None
    if cfg["sim"]["inr_from_network"]:
        _, _, entries = _network_profile(cfg)
        inrs_override = tuple(e.inr_db for e in entries)
        print(f"interference from network profile: {len(inrs_override)} sectors")
    pairs = parse_antenna_configs(cfg)
    outputs = []
    saturated = 0
    for stream_key, (n_t, n_r) in enumerate(pairs):
        scfg = sim_config(
            cfg, n_t=n_t, n_r=n_r, stream_key=stream_key, inrs_db_override=inrs_override
        )
        curve = simulate.run_sweep(scfg, workers=workers)
        name = f"ber_{n_t}x{n_r}.csv"
        simulate.write_ber_csv(curve, out_dir / name)
        outputs.append(name)
        for p in curve.points:
            flag = "  SATURATED" if p.saturated else ""
            print(
                f"{n_t}x{n_r} snr {p.snr_db:6.2f} dB: ber {p.ber:.5e} "
                f"ci [{p.ci_low:.5e}, {p.ci_high:.5e}] trials {p.trials}{flag}"
            )
            saturated += int(p.saturated)
        print(f"wrote {name}")
    _write_manifest(out_dir, "simulate", cfg, outputs, started)
    if saturated:
        print(f"warning: {saturated} point(s) saturated at max_trials", file=sys.stderr)
        return 3
    return 0


def _check_kronecker_covariance(fault: str):
    rng = np.random.default_rng(314159)
    rx = channel.exponential_correlation(2, 0.7)
    tx = channel.exponential_correlation(2, 0.5)
    if fault == "tx_corr_non_psd":
        tx = np.array([[1.0, 2.0], [2.0, 1.0]], dtype=np.complex128)
    spec = channel.NormalizedChannelSpec(
        mean=np.zeros((2, 2), dtype=np.complex128), rx_corr=rx, tx_corr=tx
    )
    draws = channel.sample_channel(spec, rng, size=100_000)
    v = draws.reshape(draws.shape[0], -1)
    emp = (v.T @ v.conj()) / v.shape[0]
    expected = kronecker(rx, tx.conj())
    dev = float(np.abs(emp - expected).max())
    return dev <= 0.02, f"max covariance deviation {dev:.4f} (tolerance 0.02)"


def _check_power_identity(fault: str):
    rng = np.random.default_rng(271828)
    serving = channel.build_link_spec(2, 2, 1.0, 0.5, 0.3, 2.0)
    ispec = channel.ChannelSpec(
        mean=np.zeros((2, 2), dtype=np.complex128),
        rx_corr=channel.exponential_correlation(2, 0.5),
        tx_corr=channel.exponential_correlation(2, 0.2),
        tx_cov=0.8 * np.eye(2, dtype=np.complex128),
    )
    agg = channel.aggregate(
        [channel.InterfererSpec(channel=ispec, label="a"),
         channel.InterfererSpec(channel=ispec, label="b")]
    )
    expected = channel.expected_rx_power(serving, agg)
    n = 200_000
    h = channel.sample_channel(serving, rng, size=n)
    hi = channel.sample_channel(agg, rng, size=n)
    sqrt2 = math.sqrt(2.0)
    tx = (rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))) / sqrt2
    si = (rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))) / sqrt2
    y = channel.received_signal(h, tx, hi, si, rng)
    mc = float(np.mean(np.sum(np.abs(y) ** 2, axis=1)))
    rel = abs(mc - expected) / expected
    return rel <= 0.01, f"monte carlo {mc:.4f} vs closed form {expected:.4f} ({rel:.2%} off)"


def _check_rayleigh_oracle(fault: str):
    gamma_b = 10.0 ** (5.0 / 10.0)
    snr_linear = 2.0 * gamma_b
    cfg = SimConfig(
        n_t=1,
        n_r=1,
        snr_grid_db=(10.0 * math.log10(snr_linear),),
        stopping=StoppingRule(min_bit_errors=500, max_trials=2_000_000,
                              target_rel_halfwidth=0.05),
        seed=90210,
    )
    point = simulate.run_point(cfg, cfg.snr_grid_db[0])
    oracle = simulate.rayleigh_ber_oracle(snr_linear)
    ok = point.ci_low <= oracle <= point.ci_high and point.bit_errors >= 500
    return ok, (
        f"simulated {point.ber:.5e} ci [{point.ci_low:.5e}, {point.ci_high:.5e}] "
        f"vs oracle {oracle:.5e} ({point.bit_errors} bit errors)"
    )


def _check_diversity_ordering(fault: str):
    points = []
    for n_r in (1, 2, 4):
        cfg = SimConfig(
            n_t=1,
            n_r=n_r,
            snr_grid_db=(10.0,),
            stopping=StoppingRule(min_bit_errors=200, max_trials=4_000_000,
                                  target_rel_halfwidth=0.08),
            seed=60601,
            stream_key=n_r,
        )
        points.append(simulate.run_point(cfg, 10.0))
    sep12 = points[1].ci_high < points[0].ci_low
    sep24 = points[2].ci_high < points[1].ci_low
    detail = " > ".join(f"1x{n}: {p.ber:.3e}" for n, p in zip((1, 2, 4), points))
    return sep12 and sep24, f"receive diversity at 10 dB SNR: {detail}"


def _check_antenna_formula(fault: str):
    pat = antenna.AntennaPattern()
    devs = (
        abs(antenna.gain_cut(pat, 0.0, pat.theta_3db_h) - 18.0),
        abs(antenna.gain_cut(pat, 30.0, pat.theta_3db_h) - 15.0),
        abs(antenna.gain_cut(pat, 180.0, pat.theta_3db_h) - (-12.0)),
    )
    worst = max(devs)
    return worst <= 1e-12, f"boresight/half-beamwidth/reverse deviations {worst:.2e}"


VALIDATION_CHECKS = (
    ("kronecker-covariance", _check_kronecker_covariance),
    ("received-power-identity", _check_power_identity),
    ("rayleigh-ber-oracle", _check_rayleigh_oracle),
    ("diversity-ordering", _check_diversity_ordering),
    ("antenna-formula", _check_antenna_formula),
)


def cmd_validate(cfg: dict, out_dir: Path) -> int:
    started = time.time()
    fault = os.environ.get("MIMOLINK_INJECT_FAULT", "")
    lines = []
    failures = 0
    for name, fn in VALIDATION_CHECKS:
        try:
            ok, detail = fn(fault)
        except Exception as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failures += int(not ok)
        line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
        lines.append(line)
        print(line)
    name = "validate_report.txt"
    with open(out_dir / name, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    _write_manifest(out_dir, "validate", cfg, [name], started)
    print(f"{len(VALIDATION_CHECKS) - failures}/{len(VALIDATION_CHECKS)} checks passed")
    return 1 if failures else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimolink",
        description="Link-level MIMO simulator: fading, interference, antennas, BER.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("pattern", "tabulate one antenna pattern cut"),
        ("simulate", "run the Monte Carlo BER sweeps"),
        ("network", "compute the co-channel interference report"),
        ("validate", "run the built-in oracle checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="TOML config (or a run manifest)")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--workers", type=int, default=None,
                       help="parallel trial workers (default: from config)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the configured seed")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must fit in an unsigned 64-bit integer")
            cfg["sim"]["seed"] = args.seed
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError("--workers must be >= 1")
            cfg["sim"]["workers"] = args.workers
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "pattern":
            return cmd_pattern(cfg, out_dir)
        if args.command == "simulate":
            return cmd_simulate(cfg, out_dir, cfg["sim"]["workers"])
        if args.command == "network":
            return cmd_network(cfg, out_dir)
        return cmd_validate(cfg, out_dir)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
