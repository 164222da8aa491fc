"""Command-line front end: config parsing, subcommand dispatch, CSV and
gnuplot-script emission.

Subcommands: ``region`` (rate-region boundary CSVs), ``precode`` (one-drop
precoder and SINR tables), ``pairing`` (schedules plus a brute-force
comparison on small instances), ``simulate`` (Monte Carlo scheme comparison),
``feeder`` (feeder-link bandwidth table). TOML configs are primary, JSON is
accepted, and ``--set key=value`` overrides win over file values. Exit codes:
0 success, 1 computation error, 2 usage error. Numbers are printed in their
shortest round-trip form, so re-parsing a CSV reproduces the values exactly.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli

from .chanmodel import db_to_linear
from .precode import feeder_bandwidth, enforce_per_feed_power, sinr_table, \
    zf_precoder
from .regions import (BcNomaParams, LinkPair, region_hk, region_noma_bc,
                      region_orthogonal, region_two_user)
from .sched import STRATEGIES, SizeLimitError, brute_force_pairing, pair_users
from .syssim import (SimConfig, compare_schemes, drop_channel, drop_seed,
                     make_layered_evaluator)

OUT_DIR_ENV = "SATNOMA_OUT_DIR"
REGION_MODES = ("ian", "sd", "snd", "hk", "orthogonal", "noma_bc")
FEEDER_SCHEMES = ("single_layer", "ldm", "broadcast_multicast")


class UsageError(Exception):
    """Bad invocation or configuration; maps to exit code 2."""


@dataclass(frozen=True)
class CliInvocation:
    subcommand: str
    config_path: str | None = None
    overrides: dict = field(default_factory=dict)
    out_dir: Path = Path("out")
    seed: int | None = None


# ---------------------------------------------------------------- config

def load_config(path) -> dict:
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as err:
        raise UsageError(f"cannot read config {p}: {err}") from err
    parsers = {".toml": tomli.loads, ".json": json.loads}
    order = [parsers[p.suffix]] if p.suffix in parsers else list(parsers.values())
    last = None
    for parse in order:
        try:
            data = parse(raw.decode("utf-8"))
            if not isinstance(data, dict):
                raise UsageError(f"config {p} must hold a table/object")
            return data
        except (ValueError, UnicodeDecodeError) as err:
            last = err
    raise UsageError(f"cannot parse config {p}: {last}") from last


def parse_overrides(items) -> dict:
    """key=value pairs; values parse as JSON when possible, else strings."""
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"override {item!r} is not of the form key=value")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def _sim_section(cfg: dict) -> dict:
    known = {f.name for f in dataclasses.fields(SimConfig)}
    strict = "sim" in cfg
    src = cfg["sim"] if strict else cfg
    if not isinstance(src, dict):
        raise UsageError("[sim] must be a table")
    out = {}
    for key, value in src.items():
        if key in known:
            out[key] = value
        elif not strict and isinstance(value, dict):
            continue   # other subcommands' sections
        else:
            raise UsageError(f"unknown config key {key!r}")
    return out


def build_sim_config(cfg: dict, overrides: dict, seed=None) -> SimConfig:
    d = _sim_section(cfg)
    known = {f.name for f in dataclasses.fields(SimConfig)}
    for key, value in overrides.items():
        if key not in known:
            raise UsageError(f"unknown override {key!r}")
        d[key] = value
    if seed is not None:
        d["seed"] = seed
    if "terminal_classes" in d:
        d["terminal_classes"] = tuple(tuple(c) for c in d["terminal_classes"])
    for key in ("schemes", "schedulers"):
        if key in d:
            d[key] = tuple(d[key])
    try:
        return SimConfig(**d)
    except (TypeError, ValueError) as err:
        raise UsageError(f"invalid configuration: {err}") from err


# ------------------------------------------------------------- emission

@dataclass(frozen=True)
class PlotSpec:
    """One curve of the generated gnuplot script; specs sharing (title,
    xlabel, ylabel) are drawn into the same plot block."""

    title: str
    xlabel: str
    ylabel: str
    series: str
    x: int = 1
    y: int = 2
    style: str = "lines"


@dataclass(frozen=True)
class TableResult:
    """One CSV artifact: a name (file stem), column headers, and rows."""

    name: str
    header: tuple
    rows: tuple
    plot: PlotSpec | None = None


def _fmt(value) -> str:
    if isinstance(value, np.generic):
        value = value.item()
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as err:
        raise RuntimeError(f"failed writing {path}: {err}") from err


def write_plot_script(path: Path, entries) -> None:
    """Gnuplot-compatible script; ``entries`` pairs CSV file names with
    PlotSpecs. Deterministic text, no timestamps."""
    blocks = {}
    for fname, spec in entries:
        blocks.setdefault((spec.title, spec.xlabel, spec.ylabel), []).append(
            (fname, spec))
    lines = ["# generated plot script (gnuplot)",
             'set datafile separator ","', "set key outside", "set grid"]
    for (title, xlabel, ylabel), curves in blocks.items():
        lines += [f'set title "{title}"', f'set xlabel "{xlabel}"',
                  f'set ylabel "{ylabel}"']
        plot = ", \\\n     ".join(
            f'"{fname}" every ::1 using {spec.x}:{spec.y} '
            f'with {spec.style} title "{spec.series}"'
            for fname, spec in curves)
        lines.append("plot " + plot)
        lines.append("pause -1")
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as err:
        raise RuntimeError(f"failed writing {path}: {err}") from err


def write_outputs(results, out_dir) -> Path:
    """Write result CSVs, a plot script when any result declares a plot, and
    a manifest CSV of (file, sha256, bytes); returns the manifest path."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise RuntimeError(f"cannot create output dir {out}: {err}") from err
    written = []
    for res in results:
        path = out / f"{res.name}.csv"
        write_csv(path, res.header, res.rows)
        written.append(path)
    plotted = [(f"{r.name}.csv", r.plot) for r in results if r.plot]
    if plotted:
        script = out / "plot.gp"
        write_plot_script(script, plotted)
        written.append(script)
    manifest = out / "manifest.csv"
    rows = []
    for path in sorted(written, key=lambda p: p.name):
        data = path.read_bytes()
        rows.append((path.name, hashlib.sha256(data).hexdigest(), len(data)))
    write_csv(manifest, ("file", "sha256", "bytes"), rows)
    return manifest


def _print_table(header, rows, stream=None) -> None:
    stream = stream or sys.stdout
    cells = [[str(h) for h in header]] + [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for r in cells:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip(),
              file=stream)


# ----------------------------------------------------------- subcommands

def _region_inputs(cfg: dict, overrides: dict):
    d = dict(cfg.get("region") or {})
    noma = dict(cfg.get("noma") or {})
    for key, value in overrides.items():
        if key in ("p", "g_strong", "g_weak"):
            noma[key] = value
        else:
            d[key] = value
    modes = d.pop("modes", ["ian", "sd", "snd", "hk", "orthogonal"])
    for m in modes:
        if m not in REGION_MODES:
            raise UsageError(f"unknown region mode {m!r}")
    link = None
    if any(m != "noma_bc" for m in modes):
        try:
            link = LinkPair(
                s1=db_to_linear(float(d["s1_db"])),
                s2=db_to_linear(float(d["s2_db"])),
                i1=db_to_linear(float(d["i1_db"])),
                i2=db_to_linear(float(d["i2_db"])))
        except KeyError as err:
            raise UsageError(f"region config needs {err.args[0]!r}") from err
        except (TypeError, ValueError) as err:
            raise UsageError(f"invalid region config: {err}") from err
    params = None
    if "noma_bc" in modes:
        try:
            params = BcNomaParams(p=float(noma["p"]),
                                  g_s=float(noma["g_strong"]),
                                  g_w=float(noma["g_weak"]))
        except KeyError as err:
            raise UsageError(f"[noma] config needs {err.args[0]!r}") from err
        except (TypeError, ValueError) as err:
            raise UsageError(f"invalid [noma] config: {err}") from err
    return link, params, modes


def cmd_region(inv: CliInvocation):
    cfg = load_config(inv.config_path) if inv.config_path else {}
    link, params, modes = _region_inputs(cfg, inv.overrides)
    results = []
    for mode in modes:
        if mode == "noma_bc":
            region = region_noma_bc(params)
        elif mode == "hk":
            region = region_hk(link)
        elif mode == "orthogonal":
            region = region_orthogonal(link)
        else:
            region = region_two_user(link, mode)
        results.append(TableResult(
            name=f"region_{mode}",
            header=("r1_bps_hz", "r2_bps_hz"),
            rows=tuple(map(tuple, region.boundary)),
            plot=PlotSpec(title="Achievable rate-region boundaries",
                          xlabel="r1 (b/s/Hz)", ylabel="r2 (b/s/Hz)",
                          series=mode)))
        print(f"region {mode}: {len(region.boundary)} boundary points, "
              f"max sum rate {region.max_sum_rate():.6f} b/s/Hz")
    return results


def cmd_precode(inv: CliInvocation):
    cfg = load_config(inv.config_path) if inv.config_path else {}
    sim = build_sim_config(cfg, inv.overrides, inv.seed)
    seed0 = drop_seed(sim.seed, 0)
    layout, params, users, channel, _ = drop_channel(sim, seed0)
    gains = channel.gains()
    served = [max(c, key=lambda u, b=b: (gains[u, b], -u))
              for b, c in enumerate(_candidates(users, sim.k))]
    prec = enforce_per_feed_power(zf_precoder(channel.h[served]),
                                  params.effective_feed_power())
    table = sinr_table(channel.h[served], prec)
    w_rows = [(s, n, float(prec.w[s, n].real), float(prec.w[s, n].imag))
              for s in range(prec.w.shape[0]) for n in range(prec.w.shape[1])]
    power_rows = [(s, float(p)) for s, p in enumerate(prec.stream_power)]
    sinr_rows = []
    for i, u in enumerate(served):
        sinr_db = 10.0 * np.log10(table.sinr[i])
        wanted = table.rx_power[i, table.intended[i]]
        rel = table.residual[i] / wanted if wanted > 0 else np.inf
        rel_db = 10.0 * np.log10(rel) if rel > 0 else -np.inf
        sinr_rows.append((u, int(table.intended[i]), float(sinr_db),
                          float(rel_db)))
    print(f"precode: {len(served)} streams, peak feed load "
          f"{max(prec.feed_loads()):.6f} W")
    return [
        TableResult("precoder", ("stream", "feed", "w_re", "w_im"),
                    tuple(w_rows)),
        TableResult("stream_power", ("stream", "power_w"), tuple(power_rows)),
        TableResult("sinr", ("user", "stream", "sinr_db", "residual_rel_db"),
                    tuple(sinr_rows),
                    plot=PlotSpec(title="Post-precoding SINR", xlabel="stream",
                                  ylabel="SINR (dB)", series="sinr",
                                  x=2, y=3, style="points")),
    ]


def _candidates(users, k):
    cand = [[] for _ in range(k)]
    for i, u in enumerate(users):
        cand[u.beam_id].append(i)
    return cand


def cmd_pairing(inv: CliInvocation):
    cfg = load_config(inv.config_path) if inv.config_path else {}
    overrides = dict(inv.overrides)
    strategies = overrides.pop("strategies", cfg.get("strategies", STRATEGIES))
    for s in strategies:
        if s not in STRATEGIES:
            raise UsageError(f"unknown pairing strategy {s!r}")
    sim = build_sim_config(cfg, overrides, inv.seed)
    seed0 = drop_seed(sim.seed, 0)
    layout, params, users, channel, s_sched = drop_channel(sim, seed0)
    cand = _candidates(users, sim.k)
    evaluator = make_layered_evaluator(sim, channel)
    results = []
    comparison = []
    evaluated = {}
    for strategy in strategies:
        sched = pair_users(channel, cand, strategy, seed=s_sched)
        rows = [(b, t, pair[0], pair[1], strategy)
                for b, beam in enumerate(sched.pairs)
                for t, pair in enumerate(beam)]
        results.append(TableResult(
            f"schedule_{strategy}",
            ("beam", "slot", "strong_user", "weak_user", "strategy"),
            tuple(rows)))
        try:
            evaluated[strategy] = evaluator(sched)
        except ValueError:
            evaluated[strategy] = None   # odd leftovers: no layered rate
    oracle = None
    try:
        _, oracle = brute_force_pairing(channel, cand, evaluator)
        print(f"pairing oracle: best sum rate {oracle:.6g} b/s")
    except (SizeLimitError, ValueError) as err:
        print(f"pairing oracle skipped: {err}")
    for strategy in strategies:
        rate = evaluated[strategy]
        gap = (oracle - rate) / oracle if oracle and rate is not None else None
        comparison.append((strategy, rate, gap))
    if oracle is not None:
        comparison.append(("brute_force", oracle, 0.0))
    results.append(TableResult(
        "pairing_comparison",
        ("strategy", "sum_rate_bps", "gap_vs_oracle"),
        tuple(comparison)))
    _print_table(("strategy", "sum_rate_bps", "gap_vs_oracle"), comparison)
    return results


def cmd_simulate(inv: CliInvocation):
    cfg = load_config(inv.config_path) if inv.config_path else {}
    overrides = dict(inv.overrides)
    workers = int(overrides.pop("workers", 1))
    sim = build_sim_config(cfg, overrides, inv.seed)
    comparison = compare_schemes(sim, workers=workers)
    header = ("scheme", "scheduler", "drops_used", "skipped",
              "mean_sum_rate_bps", "median_sum_rate_bps", "p10_sum_rate_bps",
              "mean_jain", "gain_vs_four_color")
    rows = [(r.scheme, r.scheduler, r.drops_used, r.skipped, r.mean_sum_rate,
             r.median_sum_rate, r.p10_sum_rate, r.mean_jain,
             r.gain_vs_four_color) for r in comparison.rows]
    drop_rows = []
    for (scheme, scheduler), drops in comparison.drop_results.items():
        for d, res in enumerate(drops):
            if res is None:
                drop_rows.append((scheme, scheduler, d,
                                  drop_seed(sim.seed, d), None, None, None))
            else:
                drop_rows.append((scheme, scheduler, d, drop_seed(sim.seed, d),
                                  res.sum_rate, res.jain, res.slots_used))
    _print_table(header, rows)
    return [
        TableResult("summary", header, tuple(rows)),
        TableResult("drops", ("scheme", "scheduler", "drop", "seed",
                              "sum_rate_bps", "jain", "slots"),
                    tuple(drop_rows)),
    ]


def cmd_feeder(inv: CliInvocation):
    overrides = dict(inv.overrides)
    if inv.config_path:
        cfg = load_config(inv.config_path)
        for key in ("k", "b"):
            overrides.setdefault(key, cfg.get("feeder", {}).get(key))
    try:
        k = int(overrides["k"])
        b = float(overrides["b"])
    except (KeyError, TypeError, ValueError) as err:
        raise UsageError("feeder needs --k <beams> and --b <hz>") from err
    plans = [feeder_bandwidth(s, k, b) for s in FEEDER_SCHEMES]
    rows = [(p.scheme, p.k, p.b, p.total_hz) for p in plans]
    _print_table(("scheme", "k", "b_hz", "total_hz"), rows)
    return [TableResult("feeder", ("scheme", "k", "b_hz", "total_hz"),
                        tuple(rows))]


_COMMANDS = {
    "region": cmd_region,
    "precode": cmd_precode,
    "pairing": cmd_pairing,
    "simulate": cmd_simulate,
    "feeder": cmd_feeder,
}


def run_cli(inv: CliInvocation) -> int:
    """Dispatch one invocation; writes artifacts and returns the exit code."""
    if inv.subcommand not in _COMMANDS:
        raise UsageError(f"unknown subcommand {inv.subcommand!r}")
    results = _COMMANDS[inv.subcommand](inv)
    manifest = write_outputs(results, inv.out_dir)
    print(f"wrote {len(results)} table(s) under {inv.out_dir} "
          f"(manifest: {manifest.name})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="satnoma",
        description="Multibeam satellite NOMA simulator")
    sub = parser.add_subparsers(dest="cmd", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML (or JSON) configuration file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config value (repeatable)")
    common.add_argument("--out-dir", default=None,
                        help=f"output directory (default ${OUT_DIR_ENV} or ./out)")
    common.add_argument("--seed", type=int, default=None,
                        help="override the configured seed")
    sub.add_parser("region", parents=[common],
                   help="rate-region boundary CSVs")
    sub.add_parser("precode", parents=[common],
                   help="one-drop precoder and SINR tables")
    sub.add_parser("pairing", parents=[common],
                   help="pairing schedules and brute-force comparison")
    p_sim = sub.add_parser("simulate", parents=[common],
                           help="Monte Carlo scheme comparison")
    p_sim.add_argument("--drops", type=int, default=None,
                       help="override the number of drops")
    p_sim.add_argument("--workers", type=int, default=1,
                       help="parallel drop evaluation (same results)")
    p_feeder = sub.add_parser("feeder", parents=[common],
                              help="feeder-link bandwidth table")
    p_feeder.add_argument("--k", type=int, help="number of beams")
    p_feeder.add_argument("--b", type=float, help="user-link bandwidth (Hz)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = parse_overrides(args.set)
        if getattr(args, "drops", None) is not None:
            overrides["drops"] = args.drops
        if getattr(args, "workers", None) not in (None, 1):
            overrides["workers"] = args.workers
        if getattr(args, "k", None) is not None:
            overrides["k"] = args.k
        if getattr(args, "b", None) is not None:
            overrides["b"] = args.b
        out_dir = args.out_dir or os.environ.get(OUT_DIR_ENV) or "out"
        inv = CliInvocation(subcommand=args.cmd, config_path=args.config,
                            overrides=overrides, out_dir=Path(out_dir),
                            seed=args.seed)
        return run_cli(inv)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    except Exception as err:   # computation/module errors -> diagnostic
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
