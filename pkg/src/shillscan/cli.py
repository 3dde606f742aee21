"""Command-line front end.

Subcommands compose through files so experiments are resumable:

* ``ingest``      parse a raw log, filter sparse items, write a JSONL cache
* ``detect``      stream per-item detection reports as JSON lines
* ``inject``      generate a fake-profile attack and write the labelled record
* ``evaluate``    run the factorial experiment (or score a detect stream
                  against a truth record) and write CSV + JSON reports
* ``sweep-alpha`` emit the detection/false-alarm curve over a threshold range

All randomness flows from ``--seed``; rerunning a command with the same
flags reproduces its outputs byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import attacks, data, evaluate
from .detect import detect_item
from .segment import PartitionConfig, hours_to_seconds

DEFAULT_ALPHA_HOURS = 0.389
DEFAULT_BETA = 10


def _common_flags(p: argparse.ArgumentParser, beta_default: int = DEFAULT_BETA) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    p.add_argument(
        "--alpha-hours",
        type=float,
        default=DEFAULT_ALPHA_HOURS,
        help="gap-spread threshold in hours (converted to whole seconds)",
    )
    p.add_argument(
        "--beta",
        type=int,
        default=beta_default,
        help="minimum gap-series length that still splits",
    )
    p.add_argument(
        "--format",
        choices=("csv", "json", "both"),
        default="both",
        help="which report files to write where both exist",
    )


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _alpha_range(text: str) -> list[float]:
    """Either a comma list '0.2,0.389' or a range 'start:stop:step' with an
    inclusive stop (to float tolerance)."""
    if ":" not in text:
        return _float_list(text)
    start_s, stop_s, step_s = text.split(":")
    start, stop, step = float(start_s), float(stop_s), float(step_s)
    if step <= 0:
        raise argparse.ArgumentTypeError("alpha range step must be > 0")
    out = []
    k = 0
    while True:
        val = start + k * step
        if val > stop + 1e-9:
            break
        out.append(round(val, 10))
        k += 1
    return out


def _load_cache(path: str) -> data.Dataset:
    return data.load_dataset(path, fmt="jsonl")


def _partition_config(args: argparse.Namespace) -> PartitionConfig:
    return PartitionConfig(
        gap_spread_limit=float(hours_to_seconds(args.alpha_hours)),
        min_split_length=args.beta,
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    dataset = data.load_dataset(args.path, fmt=args.input_format)
    dataset = data.filter_sparse_items(dataset, args.min_ratings)
    print(f"{dataset.n_items} items, {dataset.n_users} users, {dataset.n_ratings} ratings")
    if args.out:
        data.save_dataset(dataset, args.out, fmt="jsonl")
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    dataset = _load_cache(args.dataset)
    cfg = _partition_config(args)
    items = _int_list(args.items) if args.items else dataset.items
    directions = ("push", "nuke") if args.direction == "both" else (args.direction,)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for item in sorted(items):
            if item not in dataset.histories:
                raise ValueError(f"item {item} not in dataset")
            for direction in directions:
                report = detect_item(dataset.histories[item], cfg, direction)
                out.write(report.to_json_line() + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_inject(args: argparse.Namespace) -> int:
    dataset = _load_cache(args.dataset)
    selected: tuple[int, ...] = ()
    if args.model == "bandwagon":
        selected = (
            tuple(_int_list(args.selected))
            if args.selected
            else (attacks.most_rated_item(dataset),)
        )
    cfg = attacks.AttackConfig(
        model=args.model,
        direction=args.direction,
        attack_size=args.attack_size,
        target_item=args.target,
        filler_size=args.filler_size,
        selected_items=selected,
        injection_start=args.injection_start,
        max_span=args.span_seconds,
    )
    record = attacks.generate_attack(dataset, cfg, args.seed)
    with open(args.out, "w", encoding="utf-8") as fp:
        attacks.write_injection_record(record, fp)
    if args.merged_out:
        merged = attacks.inject(dataset, record)
        data.save_dataset(merged, args.merged_out, fmt="jsonl")
    print(f"{len(record.actions)} injected actions in {record.n_profiles} profiles")
    return 0


def _protocol_from_args(args: argparse.Namespace) -> evaluate.ExperimentProtocol:
    return evaluate.ExperimentProtocol(
        items_sample=args.items_sample,
        attack_sizes=tuple(_int_list(args.attack_sizes)),
        filler_sizes=tuple(_float_list(args.filler_sizes)),
        models=tuple(args.models.split(",")),
        directions=tuple(args.directions.split(",")),
        repetitions=args.repetitions,
        alpha_hours=args.alpha_hours,
        beta=args.beta,
        max_span=args.span_seconds,
        seed=args.seed,
    )


def cmd_evaluate(args: argparse.Namespace) -> int:
    dataset = _load_cache(args.dataset)
    if args.reports or args.truth:
        # Score mode: detection stream + ground-truth record -> metrics.
        if not (args.reports and args.truth):
            raise ValueError("score mode needs both --reports and --truth")
        with open(args.truth, "r", encoding="utf-8") as fp:
            truth = attacks.read_injection_record(fp)
        flagged = []
        evaluated_items = set()
        with open(args.reports, "r", encoding="utf-8") as fp:
            for line in fp:
                if not line.strip():
                    continue
                obj = json.loads(line)
                evaluated_items.add(obj["item"])
                for f in obj["flagged"]:
                    flagged.append(
                        data.RatingAction(
                            item=f["item"], user=f["user"], rating=f["rating"], ts=f["ts"]
                        )
                    )
        scoped = data.Dataset.from_actions(
            a
            for item in sorted(evaluated_items)
            if item in dataset.histories
            for a in dataset.histories[item].actions
        )
        det = evaluate.detection_rate(flagged, truth)
        fa = evaluate.false_alarm_rate(flagged, truth, scoped)
        print(
            json.dumps(
                {"detection_rate": det, "false_alarm_rate": fa}, sort_keys=True
            )
        )
        return 0
    protocol = _protocol_from_args(args)
    report = evaluate.run_experiment(dataset, protocol)
    if args.format in ("csv", "both"):
        with open(args.out_prefix + ".csv", "w", encoding="utf-8") as fp:
            evaluate.write_eval_csv(report, fp)
    if args.format in ("json", "both"):
        with open(args.out_prefix + ".json", "w", encoding="utf-8") as fp:
            evaluate.write_eval_json(report, fp)
    det, fa = report.detection_rate, report.false_alarm_rate
    print(
        "detection_rate="
        + ("absent" if det is None else f"{det:.4f}")
        + f" false_alarm_rate={fa:.4f}"
    )
    return 0


def cmd_sweep_alpha(args: argparse.Namespace) -> int:
    dataset = _load_cache(args.dataset)
    alphas = _alpha_range(args.alphas)
    protocol = _protocol_from_args(args)
    rows = evaluate.sweep_alpha(dataset, alphas, protocol)
    if args.format in ("csv", "both"):
        with open(args.out_prefix + ".csv", "w", encoding="utf-8") as fp:
            evaluate.write_sweep_csv(rows, fp)
    if args.format in ("json", "both"):
        with open(args.out_prefix + ".json", "w", encoding="utf-8") as fp:
            evaluate.write_sweep_json(rows, protocol, fp)
    print(f"{len(rows)} sweep rows over {len(alphas)} thresholds")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shillscan",
        description="Detect fake-profile rating bursts in recommender rating logs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a rating log and write a dataset cache")
    p.add_argument("path", help="raw rating log")
    p.add_argument("--input-format", choices=data.FORMATS, default="udata")
    p.add_argument("--min-ratings", type=int, default=10)
    p.add_argument("--out", help="normalized JSONL dataset cache to write")
    _common_flags(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("detect", help="stream per-item detection reports (JSON lines)")
    p.add_argument("dataset", help="JSONL dataset cache")
    p.add_argument("--direction", choices=("push", "nuke", "both"), default="both")
    p.add_argument("--items", help="comma-separated item ids (default: all)")
    p.add_argument("--out", help="output file (default: stdout)")
    _common_flags(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("inject", help="generate an attack and write the labelled record")
    p.add_argument("dataset", help="JSONL dataset cache")
    p.add_argument("--model", choices=attacks.MODELS, required=True)
    p.add_argument("--direction", choices=attacks.DIRECTIONS, required=True)
    p.add_argument("--attack-size", type=int, required=True)
    p.add_argument("--filler-size", type=float, default=0.0)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--selected", help="bandwagon selected item ids (default: most rated)")
    p.add_argument("--injection-start", type=int, default=None)
    p.add_argument("--span-seconds", type=int, default=attacks.DEFAULT_MAX_SPAN)
    p.add_argument("--out", required=True, help="injection record JSONL to write")
    p.add_argument("--merged-out", help="also write the merged dataset cache")
    _common_flags(p)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("evaluate", help="factorial experiment, or score a detect stream")
    p.add_argument("dataset", help="JSONL dataset cache")
    p.add_argument("--reports", help="score mode: detect output (JSON lines)")
    p.add_argument("--truth", help="score mode: injection record with labels")
    p.add_argument("--items-sample", type=int, default=50)
    p.add_argument("--attack-sizes", default="10,20,30,40,50")
    p.add_argument("--filler-sizes", default="0.0")
    p.add_argument("--models", default="random")
    p.add_argument("--directions", default="push")
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--span-seconds", type=int, default=attacks.DEFAULT_MAX_SPAN)
    p.add_argument("--out-prefix", default="eval", help="prefix for .csv/.json outputs")
    _common_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "sweep-alpha", help="detection/false-alarm curve over a threshold range"
    )
    p.add_argument("dataset", help="JSONL dataset cache")
    p.add_argument(
        "--alphas",
        required=True,
        help="comma list '0.2,0.389' or range 'start:stop:step' in hours",
    )
    p.add_argument("--items-sample", type=int, default=50)
    p.add_argument("--attack-sizes", default="50")
    p.add_argument("--filler-sizes", default="0.0")
    p.add_argument("--models", default="random")
    p.add_argument("--directions", default="push")
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--span-seconds", type=int, default=attacks.DEFAULT_MAX_SPAN)
    p.add_argument("--out-prefix", default="sweep", help="prefix for .csv/.json outputs")
    # The sweep's published protocol fixes the length guard at 0.
    _common_flags(p, beta_default=0)
    p.set_defaults(func=cmd_sweep_alpha)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (data.LogParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
