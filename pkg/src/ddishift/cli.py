"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 unsatisfiable split.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import dataio
from .baseline import gamma_sweep, run_benchmark
from .consistency import consistency_sweep, sweep_to_csv
from .core import MODES, MULTICLASS, MULTILABEL, Dataset, validate_dataset
from .errors import DataError, DdiShiftError, SplitError
from .metrics import multiclass_report, multilabel_report
from .simkit import load_matrix, pairwise_similarity, save_matrix
from .splitkit import SplitRequest, Strategy, make_split
from .synth import SynthConfig, make_time_correlated
from .taskgen import assemble_tasks, carve_validation, dataset_stats, filter_type_band, parse_band

log = logging.getLogger("ddishift")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SPLIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _csv_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _year_range(text: str) -> list[int]:
    """``1980:2020:5`` (inclusive) or a comma list."""
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        if step <= 0 or hi < lo:
            raise argparse.ArgumentTypeError(f"bad year range {text!r}")
        return list(range(lo, hi + 1, step))
    return _csv_ints(text)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=42, help="seed for every random choice (default 42)")
    p.add_argument("--mode", choices=MODES, default=MULTICLASS)
    p.add_argument("--out", type=Path, default=Path("ddishift_out"), help="output directory")
    p.add_argument("--quiet", action="store_true", help="suppress progress messages")
    return p


def _data_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input data")
    g.add_argument("--data", type=Path, help="directory with triplets.tsv, fingerprints.tsv, approval.tsv, relations.txt")
    g.add_argument("--triplets", type=Path)
    g.add_argument("--fingerprints", type=Path)
    g.add_argument("--approval", type=Path)
    g.add_argument("--relations", type=Path)
    g.add_argument("--column-order", help="triplet column letters, e.g. hrt or htrl")
    g.add_argument("--type-freq-band", help="keep relation types whose positive count lies in lo:hi")


def _split_args(p: argparse.ArgumentParser, multi: bool = False) -> None:
    g = p.add_argument_group("split")
    if multi:
        g.add_argument("--strategies", default="random,cluster", help="comma list of strategies")
    else:
        g.add_argument("--strategy", choices=[s.value for s in Strategy], default="cluster")
    g.add_argument("--gamma", type=float, help="similarity ceiling gamma0 for cluster splits")
    g.add_argument("--new-fraction", type=float, default=0.2)
    g.add_argument("--threshold-year", type=int)
    g.add_argument("--fraction-tolerance", type=float, default=0.05)
    g.add_argument("--matrix", type=Path, help="similarity cache written by `sim`")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="ddishift", description="Distribution-shift splits and evaluation for emerging DDI benchmarks.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("validate", parents=[common], help="check input files and print statistics")
    _data_args(p)

    p = sub.add_parser("sim", parents=[common], help="compute and cache pairwise Tanimoto similarity")
    _data_args(p)

    p = sub.add_parser("split", parents=[common], help="split drugs into known and new sets")
    _data_args(p)
    _split_args(p)

    p = sub.add_parser("tasks", parents=[common], help="write train/S1/S2 files for a drug split")
    _data_args(p)
    p.add_argument("--split", type=Path, required=True, help="split.json from `split`")
    p.add_argument("--validation-fraction", type=float, help="also carve this fraction of train into valid.tsv")

    p = sub.add_parser("consistency", parents=[common], help="score split schemes against approval years")
    p.add_argument("schemes", nargs="+", help="split.json files, optionally as NAME=PATH")
    p.add_argument("--approval", type=Path, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--threshold-year", type=int)
    g.add_argument("--years", type=_year_range, help="lo:hi[:step] or comma list")

    p = sub.add_parser("eval", parents=[common], help="score a prediction file")
    p.add_argument("--predictions", type=Path, required=True)
    p.add_argument("--gold", type=Path, help="gold triplets (multiclass)")
    p.add_argument("--threshold", type=float, default=0.5, help="multilabel decision threshold")

    p = sub.add_parser("bench", parents=[common], help="run the nearest-neighbour baseline over splits and seeds")
    _data_args(p)
    _split_args(p, multi=True)
    p.add_argument("--seeds", type=_csv_ints, help="comma list (default: --seed)")
    p.add_argument("--threshold", type=float, default=0.5)

    p = sub.add_parser("sweep", parents=[common], help="baseline performance across gamma thresholds")
    _data_args(p)
    p.add_argument("--gammas", type=_csv_floats, default=[0.9, 0.7, 0.5, 0.3])
    p.add_argument("--seeds", type=_csv_ints)
    p.add_argument("--new-fraction", type=float, default=0.2)
    p.add_argument("--fraction-tolerance", type=float, default=0.05)
    p.add_argument("--matrix", type=Path)
    p.add_argument("--threshold", type=float, default=0.5)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic time-correlated dataset")
    d = SynthConfig()
    p.add_argument("--drugs", type=int, default=d.n_drugs)
    p.add_argument("--clusters", type=int, default=d.n_clusters)
    p.add_argument("--width", type=int, default=d.width)
    p.add_argument("--epochs", type=int, default=d.n_epochs)
    p.add_argument("--triplets", type=int, default=d.n_triplets)
    p.add_argument("--relations", type=int, default=d.n_relations)
    return parser


def _manifest(args) -> dataio.FileManifest:
    if args.data is not None:
        m = dataio.FileManifest.from_dir(args.data, args.mode)
    elif args.triplets is not None:
        m = dataio.FileManifest(triplets_path=args.triplets, mode=args.mode)
    else:
        raise UsageError("give --data DIR or --triplets FILE")
    overrides = {
        k: v
        for k, v in {
            "triplets_path": args.triplets,
            "fingerprints_path": args.fingerprints,
            "approval_path": args.approval,
            "relations_path": args.relations,
            "column_order": args.column_order,
        }.items()
        if v is not None
    }
    return dataio.FileManifest(**{**m.__dict__, **overrides})


def _load(args) -> Dataset:
    ds = dataio.load_dataset(_manifest(args))
    if args.type_freq_band:
        lo, hi = _band(args.type_freq_band)
        ds = filter_type_band(ds, lo, hi)
        log.info("kept %d triplets in type-frequency band %d:%d", len(ds.triplets), lo, hi)
    return ds


def _band(text: str) -> tuple[int, int]:
    try:
        return parse_band(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _matrix(args, ds: Dataset):
    if getattr(args, "matrix", None) is not None:
        return load_matrix(args.matrix)
    if not ds.fingerprints:
        raise DataError("this command needs fingerprints (--fingerprints or fingerprints.tsv)")
    return pairwise_similarity(ds.fingerprints)


def _request(args, strategy: str) -> SplitRequest:
    try:
        return SplitRequest(
            strategy=strategy,
            seed=args.seed,
            new_fraction=args.new_fraction,
            gamma0=args.gamma,
            threshold_year=args.threshold_year,
            fraction_tolerance=args.fraction_tolerance,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def cmd_validate(args) -> int:
    manifest = _manifest(args)
    manifest.check()
    triplets = dataio.load_triplets(manifest.triplets_path, manifest.mode, manifest.column_order)
    prints = dataio.load_fingerprints(manifest.fingerprints_path) if manifest.fingerprints_path else {}
    years = dataio.load_approval_years(manifest.approval_path) if manifest.approval_path else {}
    relations = dataio.load_relations(manifest.relations_path) if manifest.relations_path else None
    drugs = set(prints) if prints else {t.head for t in triplets} | {t.tail for t in triplets}
    ds = Dataset(tuple(drugs), tuple(triplets), manifest.mode, relations, prints, years)
    summary = validate_dataset(ds)
    band = _band(args.type_freq_band) if args.type_freq_band else None
    stats = dataset_stats(ds, band)
    report = {
        "drugs": summary.n_drugs,
        "relations": summary.n_relations,
        "triplets": summary.n_triplets,
        "approval_coverage": round(len(years) / len(drugs), 6) if drugs else 0.0,
        "errors": summary.errors,
        "stats": stats.to_dict(),
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK if summary.ok else EXIT_DATA


def cmd_sim(args) -> int:
    ds = _load(args)
    if not ds.fingerprints:
        raise DataError("sim needs fingerprints")
    matrix = pairwise_similarity(ds.fingerprints)
    path = args.out / "similarity.bin"
    args.out.mkdir(parents=True, exist_ok=True)
    save_matrix(matrix, path)
    log.info("wrote %s (%d drugs, %d pairs)", path, matrix.n, len(matrix.values))
    print(json.dumps({"drugs": matrix.n, "width": matrix.width, "max_similarity": matrix.global_max()}))
    return EXIT_OK


def cmd_split(args) -> int:
    ds = _load(args)
    request = _request(args, args.strategy)
    matrix = _matrix(args, ds) if request.strategy is Strategy.CLUSTER else None
    split = make_split(ds, request, matrix)
    path = args.out / "split.json"
    args.out.mkdir(parents=True, exist_ok=True)
    dataio.write_drug_split(split, path)
    log.info("wrote %s: %d known, %d new", path, len(split.known), len(split.new))
    return EXIT_OK


def cmd_tasks(args) -> int:
    ds = _load(args)
    split = dataio.read_drug_split(args.split)
    tasks = assemble_tasks(ds, split)
    if args.validation_fraction is not None:
        try:
            tasks, valid = carve_validation(tasks, args.validation_fraction, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        args.out.mkdir(parents=True, exist_ok=True)
        dataio.write_triplets(valid, args.out / "valid.tsv")
    dataio.write_task_split(tasks, args.out)
    log.info("train=%d s1=%d s2=%d dropped=%d", len(tasks.train), len(tasks.s1_test), len(tasks.s2_test), tasks.dropped)
    return EXIT_OK


def cmd_consistency(args) -> int:
    schemes = []
    for item in args.schemes:
        name, sep, path = item.partition("=")
        if not sep:
            name, path = Path(item).parent.name or Path(item).stem, item
        schemes.append((name, dataio.read_drug_split(path)))
    years = dataio.load_approval_years(args.approval)
    thresholds = [args.threshold_year] if args.threshold_year is not None else args.years
    try:
        results = consistency_sweep(schemes, years, thresholds)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(args.out / "consistency.csv", sweep_to_csv(results))
    return EXIT_OK


def cmd_eval(args) -> int:
    records = dataio.load_predictions(args.predictions, args.mode)
    if args.mode == MULTILABEL:
        report = multilabel_report(records, args.threshold)
    else:
        if args.gold is None:
            raise UsageError("multiclass eval needs --gold")
        report = multiclass_report(records, dataio.load_triplets(args.gold, MULTICLASS))
    _write(args.out / "report.json", report.to_json())
    _write(args.out / "report.csv", report.to_csv())
    print(json.dumps(report.aggregate, sort_keys=True))
    return EXIT_OK


def cmd_bench(args) -> int:
    ds = _load(args)
    requests = [_request(args, s.strip()) for s in args.strategies.split(",") if s.strip()]
    matrix = _matrix(args, ds)
    result = run_benchmark(ds, requests, args.seeds or [args.seed], matrix, args.threshold)
    _write(args.out / "benchmark.csv", result.to_csv())
    return EXIT_OK


def cmd_sweep(args) -> int:
    ds = _load(args)
    matrix = _matrix(args, ds)
    try:
        result = gamma_sweep(
            ds, args.gammas, args.seeds or [args.seed], args.new_fraction, args.fraction_tolerance, matrix, args.threshold
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for g, reason in result.skipped.items():
        log.warning("skipped gamma %g: %s", g, reason)
    _write(args.out / "sweep.csv", result.to_csv())
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        config = SynthConfig(
            n_drugs=args.drugs,
            n_clusters=args.clusters,
            n_epochs=args.epochs,
            width=args.width,
            n_relations=args.relations,
            n_triplets=args.triplets,
            mode=args.mode,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    dataio.write_dataset(make_time_correlated(config), args.out)
    log.info("wrote synthetic dataset to %s", args.out)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "sim": cmd_sim,
    "split": cmd_split,
    "tasks": cmd_tasks,
    "consistency": cmd_consistency,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ddishift {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SplitError as exc:
        print(f"ddishift {args.command}: {exc}", file=sys.stderr)
        return EXIT_SPLIT
    except (DdiShiftError, OSError) as exc:
        print(f"ddishift {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
