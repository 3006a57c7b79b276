"""Command-line surface.

Subcommands: ``generate`` (one dump to one mask), ``batch`` (many dumps,
parallel, deterministic), ``eval`` (mIoU report), ``synth`` (fixture
dumps), ``inspect`` (attention heatmaps).

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 write failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .aggregate import aggregate_dump
from .atnb import write_tensor
from .config import DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_SCHEDULE, PipelineConfig
from .dump import load_dump
from .errors import InputError, IoError, SeedgrowError
from .expansion import Trace
from .masks import FinalMask
from .metrics import evaluate
from .pngio import read_binary_mask, write_binary_mask, write_heatmap
from .seeding import class_channel
from .strategies import run_strategy
from .synth import PRESETS, make_synthetic_dump

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_OUTPUT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_schedule(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise InputError(f"bad schedule {text!r}: expected comma-separated integers")


def _unit_interval(name: str, value: float) -> float:
    if not 0.0 < value <= 1.0:
        raise InputError(f"{name} {value} outside (0, 1]")
    return value


def _config_from_args(args) -> PipelineConfig:
    schedule = _parse_schedule(args.schedule)
    return PipelineConfig(
        alpha=_unit_interval("--alpha", args.alpha),
        beta=_unit_interval("--beta", args.beta),
        scale_schedule=schedule,
        strategy=args.strategy,
        ca_seed_scale=schedule[0],
        background=not args.no_background,
        bg_alpha=args.bg_alpha,
        reseed_from_ca=args.reseed_from_ca,
    )


def _write_outputs(result: FinalMask, out_dir: Path,
                   trace: Trace | None, heatmap: bool = False) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_binary_mask(result.binary, out_dir / "mask.png")
    write_tensor(result.soft.astype(np.float32), out_dir / "soft.atnb")
    if heatmap:
        write_heatmap(result.soft, out_dir / "soft.png")
    if trace is not None:
        tdir = out_dir / "trace"
        tdir.mkdir(exist_ok=True)
        index = {"masks": [], "seeds": []}
        for name, mask in trace.masks:
            rel = f"{name}.atnb"
            write_tensor(mask.data.astype(np.float32), tdir / rel)
            index["masks"].append({"name": name, "scale": mask.scale, "path": rel})
        for name, seeds in trace.seeds:
            index["seeds"].append({"name": name, "scale": seeds.scale,
                                   "coords": seeds.sorted()})
        (tdir / "index.json").write_text(json.dumps(index, indent=2) + "\n",
                                         encoding="utf-8")


def _generate_one(dump_dir: str, out_dir: str, config: PipelineConfig,
                  trace_enabled: bool, heatmap: bool = False) -> dict:
    dump = aggregate_dump(load_dump(dump_dir))
    trace = Trace() if trace_enabled else None
    result = run_strategy(dump, config, trace=trace)
    _write_outputs(result, Path(out_dir), trace, heatmap=heatmap)
    return {
        "dump": str(dump_dir),
        "image_path": (str(Path(dump_dir) / dump.manifest.image_path)
                       if dump.manifest.image_path else None),
        "mask_path": str(Path(out_dir) / "mask.png"),
        "soft_path": str(Path(out_dir) / "soft.atnb"),
        "class_label": result.class_label,
    }


def cmd_generate(args) -> int:
    config = _config_from_args(args)
    try:
        _generate_one(args.dump_dir, args.out, config, args.trace,
                      heatmap=args.heatmap)
    except (IoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    except SeedgrowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _batch_worker(job: tuple[str, str, PipelineConfig, bool]) -> tuple[str, dict]:
    dump_dir, out_dir, config, trace_enabled = job
    try:
        entry = _generate_one(dump_dir, out_dir, config, trace_enabled)
        return ("ok", entry)
    except SeedgrowError as exc:
        return ("error", {"dump": dump_dir, "error": str(exc)})


def cmd_batch(args) -> int:
    config = _config_from_args(args)
    dump_dirs: list[str] = []
    for item in args.dumps:
        p = Path(item)
        if p.is_dir():
            dump_dirs.append(str(p))
        elif p.is_file():  # list file: one dump directory per line
            for line in p.read_text(encoding="utf-8").splitlines():
                line = line.strip()
                if line:
                    dump_dirs.append(line)
        else:
            print(f"error: no such dump or list file: {item}", file=sys.stderr)
            return EXIT_INPUT
    if not dump_dirs:
        print("error: no dumps to process", file=sys.stderr)
        return EXIT_INPUT

    out_root = Path(args.out)
    try:
        out_root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT

    jobs = [(d, str(out_root / Path(d).name), config, args.trace)
            for d in dump_dirs]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_batch_worker, jobs))
    else:
        results = [_batch_worker(job) for job in jobs]

    entries = [entry for status, entry in results if status == "ok"]
    for entry in entries:  # keep the manifest relocatable
        for key in ("mask_path", "soft_path"):
            entry[key] = str(Path(entry[key]).relative_to(out_root))
    failures = [entry for status, entry in results if status == "error"]
    manifest = {"entries": entries, "failures": failures}
    try:
        (out_root / "dataset.json").write_text(
            json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    for failure in failures:
        print(f"failed: {failure['dump']}: {failure['error']}", file=sys.stderr)
    print(f"processed {len(entries)}/{len(jobs)} dumps -> {out_root}")
    if failures and args.strict:
        return EXIT_INPUT
    return EXIT_OK


def cmd_eval(args) -> int:
    pred_dir = Path(args.pred)
    gt_dir = Path(args.gt)
    try:
        class_map = json.loads(Path(args.classes).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        print(f"error: cannot read class map: {exc}", file=sys.stderr)
        return EXIT_INPUT
    pairs = []
    try:
        for name, label in sorted(class_map.items()):
            pred = read_binary_mask(pred_dir / f"{name}.png")
            gt = read_binary_mask(gt_dir / f"{name}.png")
            pairs.append((pred, gt, label))
        report = evaluate(pairs, per_image=args.per_image)
    except SeedgrowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    payload = json.dumps(report.to_json(), indent=2) + "\n"
    try:
        Path(args.out).write_text(payload, encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    print(f"mIoU: {report.miou:.4f}")
    return EXIT_OK


def cmd_synth(args) -> int:
    preset = PRESETS[args.preset]
    try:
        spec = preset(rng_seed=args.seed) if args.preset != "clean" else preset(
            shape=args.shape, rng_seed=args.seed, noise=args.noise)
        make_synthetic_dump(args.out, spec, mode=args.mode,
                            layers=args.layers, timesteps=args.timesteps)
    except SeedgrowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    print(f"wrote synthetic dump to {args.out}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    try:
        dump = aggregate_dump(load_dump(args.dump_dir))
    except SeedgrowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for scale, agg in sorted(dump.aggregated.items()):
            chan = class_channel(agg, dump.manifest.class_token_indices)
            write_heatmap(chan.data, out_dir / f"ca_s{scale}.png")
            if args.at is not None:
                i, j = args.at
                if not (0 <= i < scale and 0 <= j < scale):
                    continue  # coordinate only meaningful at larger scales
                write_heatmap(agg.sa[i, j] / max(agg.sa[i, j].max(), 1e-12),
                              out_dir / f"sa_s{scale}_at_{i}_{j}.png")
    except (IoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    print(f"wrote heatmaps to {out_dir}")
    return EXIT_OK


def _add_generation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                   help="seed threshold (default %(default)s)")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA,
                   help="binarization threshold (default %(default)s)")
    p.add_argument("--strategy", choices=("caa", "ca_sa", "seediff"),
                   default="seediff")
    p.add_argument("--schedule", default=",".join(map(str, DEFAULT_SCHEDULE)),
                   help="comma-separated scales (default %(default)s)")
    p.add_argument("--no-background", action="store_true",
                   help="skip the background refinement stage")
    p.add_argument("--bg-alpha", type=float, default=None,
                   help="override alpha for background seeding")
    p.add_argument("--reseed-from-ca", action="store_true",
                   help="re-extract seeds from the CA channel at every scale")
    p.add_argument("--trace", action="store_true",
                   help="persist intermediate masks and seed sets")
    p.add_argument("--heatmap", action="store_true",
                   help="also export the soft mask as an 8-bit PNG")


def _parse_coord(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'row,col', got {text!r}")
    return int(parts[0]), int(parts[1])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seedgrow",
                     description="Segmentation masks from attention dumps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="one dump -> mask.png + soft.atnb")
    p.add_argument("dump_dir")
    p.add_argument("-o", "--out", required=True)
    _add_generation_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("batch", help="process many dumps in parallel")
    p.add_argument("dumps", nargs="+",
                   help="dump directories and/or list files (one dir per line)")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--strict", action="store_true",
                   help="non-zero exit if any dump fails")
    _add_generation_flags(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--classes", required=True,
                   help="JSON file: mask stem -> class label")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--per-image", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="write a synthetic fixture dump")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--preset", choices=sorted(PRESETS), default="clean")
    p.add_argument("--shape", choices=("disk", "rectangle", "two_blobs"),
                   default="disk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--mode", choices=("aggregated", "full"), default="aggregated")
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--timesteps", type=int, default=2)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("inspect", help="dump CA / SA heatmaps")
    p.add_argument("dump_dir")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--at", type=_parse_coord, default=None,
                   help="SA slice coordinate 'row,col'")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:  # bad flag values surface as usage errors
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
