"""Command-line front end: symbol generation, decomposition, operator runs,
named experiments, and report merging.

Exit codes: 0 success, 1 validation error (bad arguments, malformed input,
overwrite refusal), 2 experiment ran but its pass/fail threshold failed —
so CI can gate on acceptance experiments.
"""

from __future__ import annotations

import argparse
import csv
import glob as globmod
import json
import os
import struct
import sys

import numpy as np

from . import __version__
from .bilinear import SymbolGrid, apply_bilinear, operator_ratio
from .bumps import BumpSpec
from .experiments import (
    EXPERIMENTS,
    ExperimentRecord,
    config_hash,
    run_experiment,
)
from .grid import l1_norm, spectral_from_json
from .rowcol import CoeffMatrix, decompose, verify_partition
from .symbols import (
    CounterexampleAConfig,
    CounterexampleBConfig,
    block_A_symbol,
    counterexample_B_block,
    lattice_symbol,
)

_MAGIC = b"BMLT"
_FMT_VERSION = 1


def write_symbol(path: str, m: SymbolGrid, meta: dict, force: bool = False) -> None:
    """Binary dump (little-endian complex64, row-major) plus a JSON sidecar."""
    if os.path.exists(path) and not force:
        raise FileExistsError(f"refusing to overwrite {path} (use --force)")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIId", _FMT_VERSION, m.dim, m.radius, m.spacing))
        fh.write(m.values.astype("<c8").tobytes(order="C"))
    sidecar = dict(meta)
    sidecar.update(
        {
            "toolVersion": __version__,
            "dim": m.dim,
            "radius": m.radius,
            "spacing": m.spacing,
            "provenance": m.provenance,
        }
    )
    side_path = path + ".json"
    if os.path.exists(side_path) and not force:
        raise FileExistsError(f"refusing to overwrite {side_path} (use --force)")
    with open(side_path, "w") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_symbol(path: str) -> SymbolGrid:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a symbol file")
        version, dim, radius, spacing = struct.unpack("<IIId", fh.read(20))
        if version != _FMT_VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        count = (2 * radius + 1) ** dim
        vals = np.frombuffer(fh.read(), dtype="<c8", count=count)
    return SymbolGrid(
        dim, radius, vals.astype(complex).reshape((2 * radius + 1,) * dim), spacing
    )


def _require_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("BIMULT_SEED")
    if env is not None:
        return int(env)
    raise ValueError("a master seed is required (--seed or BIMULT_SEED)")


def _guard_overwrite(path: str, force: bool) -> None:
    if os.path.exists(path) and not force:
        raise FileExistsError(f"refusing to overwrite {path} (use --force)")


def _cmd_gen_symbol(args) -> int:
    seed = _require_seed(args)
    if args.kind == "lattice":
        with open(args.coeffs) as fh:
            c = CoeffMatrix.from_json(fh.read())
        m = lattice_symbol(
            c, BumpSpec(radius=0.1, plateau=0.05), args.resolution
        )
        cfg = {"kind": "lattice", "coeffs": args.coeffs, "resolution": args.resolution}
    elif args.kind == "block-A":
        acfg = CounterexampleAConfig(
            block_b=tuple(4**k for k in range(1, args.K + 1)),
            dstar_exponent=args.exponent,
            master_seed=seed,
            resolution=args.resolution,
        )
        I = acfg.interval(args.K)
        center = (I.start + I.stop - 1) // 2
        m = block_A_symbol(acfg, args.K, acfg.block_seed(args.K), center=center)
        cfg = {
            "kind": "block-A",
            "K": args.K,
            "exponent": args.exponent,
            "resolution": args.resolution,
            "seed": seed,
        }
    elif args.kind == "block-B":
        bcfg = CounterexampleBConfig(
            mode=args.mode,
            Ns=(args.N,),
            master_seed=seed,
            resolution=args.resolution,
        )
        m = counterexample_B_block(bcfg, args.N)
        cfg = {
            "kind": "block-B",
            "mode": args.mode,
            "N": args.N,
            "resolution": args.resolution,
            "seed": seed,
        }
    else:
        raise ValueError(f"unknown symbol kind {args.kind!r}")
    write_symbol(args.out, m, {"configHash": config_hash(cfg), "config": cfg}, args.force)
    print(f"wrote {args.out} ({(2 * m.radius + 1)}^{m.dim} samples)")
    return 0


def _cmd_decompose(args) -> int:
    with open(args.infile) as fh:
        f = CoeffMatrix.from_json(fh.read())
    part = decompose(f)
    max_row, max_col = verify_partition(f, part)
    _guard_overwrite(args.out, args.force)
    with open(args.out, "w") as fh:
        fh.write(part.to_json() + "\n")
    print(f"wrote {args.out}: maxRowSum={max_row:.6g} maxColSum={max_col:.6g}")
    return 0


def _cmd_apply(args) -> int:
    m = read_symbol(args.symbol)
    with open(args.f) as fh:
        f = spectral_from_json(fh.read())
    with open(args.g) as fh:
        g = spectral_from_json(fh.read())
    field = apply_bilinear(m, f, g)
    ratio = operator_ratio(m, f, g)
    if args.out:
        _guard_overwrite(args.out, args.force)
        payload = {
            "toolVersion": __version__,
            "l1Norm": l1_norm(field),
            "operatorRatio": ratio,
        }
        with open(args.out, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    print(f"operatorRatio={ratio:.12g}")
    return 0


def _experiment_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        with open(args.config) as fh:
            cfg.update(json.load(fh))
    if args.M:
        cfg["M"] = [int(x) for x in args.M.split(",")]
    if args.N:
        cfg["N"] = [int(x) for x in args.N.split(",")]
    if args.mode:
        cfg["mode"] = args.mode
    if args.pool is not None:
        cfg["pool"] = args.pool
    if args.f_mode:
        cfg["f_mode"] = args.f_mode
    if args.resolution is not None:
        cfg["resolution"] = args.resolution
    return cfg


def _cmd_experiment(args) -> int:
    seed = _require_seed(args)
    cfg = _experiment_config(args)
    rec = run_experiment(args.name, cfg, seed, threads=args.threads)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{args.name}-{rec.config_hash}-{seed}.jsonl")
    _guard_overwrite(path, args.force)
    with open(path, "w") as fh:
        fh.write(rec.to_json_line() + "\n")
    status = "PASS" if rec.summary.get("passed", True) else "FAIL"
    print(f"{args.name}: {status} ({path}, {rec.wall_clock:.2f}s)")
    return 0 if rec.summary.get("passed", True) else 2


def _cmd_report(args) -> int:
    paths = sorted(p for pattern in args.inputs for p in globmod.glob(pattern))
    records = []
    for path in paths:
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    records.append(ExperimentRecord.from_json_line(line))
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "summary.csv")
    _guard_overwrite(csv_path, args.force)
    keys = sorted({k for rec in records for k in rec.summary})
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["experimentName", "configHash", "masterSeed"] + keys)
        for rec in records:
            writer.writerow(
                [rec.experiment_name, rec.config_hash, rec.master_seed]
                + [rec.summary.get(k, "") for k in keys]
            )
    # two-column plot data per record, using the record's natural x axis
    axes = {"growth-A": ("K", "measured"), "growth-B": ("N", "measured"),
            "counting": ("M", "sumSquares"), "levelset": ("lambda", "coeffMeasure"),
            "khintchine": ("size", "mcRatio"), "boundedness": ("trial", "normalizedRatio")}
    for rec in records:
        if rec.experiment_name not in axes:
            continue
        xk, yk = axes[rec.experiment_name]
        rows = [r for r in rec.per_trial_results if xk in r and yk in r]
        if not rows:
            continue
        name = f"{rec.experiment_name}-{rec.config_hash}-{rec.master_seed}.dat"
        dat_path = os.path.join(args.out, name)
        _guard_overwrite(dat_path, args.force)
        with open(dat_path, "w") as fh:
            for r in rows:
                fh.write(f"{r[xk]} {r[yk]}\n")
    print(f"wrote {csv_path} ({len(records)} records)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bimult",
        description="Bilinear multiplier laboratory: symbols, decompositions, experiments.",
    )
    p.add_argument("--version", action="version", version=f"bimult {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-symbol", help="generate a symbol grid (binary + JSON sidecar)")
    g.add_argument("--kind", choices=["lattice", "block-A", "block-B"], required=True)
    g.add_argument("--coeffs", help="coefficient matrix JSON (kind=lattice)")
    g.add_argument("--K", type=int, default=1, help="block index (kind=block-A)")
    g.add_argument("--N", type=int, default=1, help="scale index (kind=block-B)")
    g.add_argument("--exponent", type=float, default=0.125)
    g.add_argument("--mode", choices=["paper", "desk"], default="desk")
    g.add_argument("--resolution", type=int, default=20)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", required=True)
    g.add_argument("--force", action="store_true")
    g.set_defaults(fn=_cmd_gen_symbol)

    d = sub.add_parser("decompose", help="row/column split of a coefficient matrix")
    d.add_argument("--in", dest="infile", required=True)
    d.add_argument("--out", required=True)
    d.add_argument("--force", action="store_true")
    d.set_defaults(fn=_cmd_decompose)

    a = sub.add_parser("apply", help="evaluate the operator on spectral inputs")
    a.add_argument("--symbol", required=True)
    a.add_argument("--f", required=True)
    a.add_argument("--g", required=True)
    a.add_argument("--out")
    a.add_argument("--force", action="store_true")
    a.set_defaults(fn=_cmd_apply)

    e = sub.add_parser("experiment", help="run a named experiment, write JSONL")
    e.add_argument("name", choices=sorted(EXPERIMENTS))
    e.add_argument("--config", help="JSON config file")
    e.add_argument("--M", help="comma-separated list (counting)")
    e.add_argument("--N", help="comma-separated list (growth-B, levelset)")
    e.add_argument("--mode", choices=["paper", "desk"])
    e.add_argument("--pool", type=int)
    e.add_argument("--f-mode", choices=["lattice", "besov", "fourier_compact"])
    e.add_argument("--resolution", type=int)
    e.add_argument("--seed", type=int)
    e.add_argument("--threads", type=int, default=1)
    e.add_argument("--out", help="output directory (default .)")
    e.add_argument("--force", action="store_true")
    e.set_defaults(fn=_cmd_experiment)

    r = sub.add_parser("report", help="merge JSONL records into CSV + plot data")
    r.add_argument("inputs", nargs="+", help="JSONL files or globs")
    r.add_argument("--out", default="report")
    r.add_argument("--force", action="store_true")
    r.set_defaults(fn=_cmd_report)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.fn(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
