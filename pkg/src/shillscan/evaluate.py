"""Experiment harness: metrics, item taxonomy, and factorial attack runs.

The two headline metrics: detection rate is the fraction of injected
attack ratings that the detector flags on the target item, and false
alarm rate is the fraction of normal ratings on the evaluated items that
get flagged by mistake.  Filler ratings on other items take part in
neither metric; the detector is judged on the attacked item's history.

``run_experiment`` drives the full factorial protocol: for every cell
(model x direction x attack size x filler size), every repetition, and
every sampled target item, it generates a seeded attack, augments the
target's history, runs the detector, and tallies the metrics overall and
per item class.  Cell seeds are derived from (protocol seed, cell,
repetition, item), so cells are independent and runs reproduce exactly.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Sequence, TextIO

import numpy as np

from .attacks import AttackConfig, InjectionRecord, generate_attack, most_rated_item
from .data import Dataset, RatingAction, RatingHistory
from .detect import detect_item
from .segment import PartitionConfig, hours_to_seconds

ITEM_CLASSES = ("fad", "fashion", "style", "scallop")

EVAL_CSV_COLUMNS = (
    "model",
    "direction",
    "attack_size",
    "filler_size",
    "alpha_hours",
    "beta",
    "item_class",
    "detection_rate",
    "false_alarm_rate",
)
EVAL_JSON_SCHEMA = "shillscan-eval/1"
SWEEP_CSV_COLUMNS = ("alpha_hours", "item_class", "detection_rate", "false_alarm_rate")
SWEEP_JSON_SCHEMA = "shillscan-sweep/1"


def detection_rate(
    flagged: Iterable[RatingAction], truth: InjectionRecord
) -> float | None:
    """Fraction of the injected target-item actions that were flagged.

    Filler-item actions take part in neither numerator nor denominator;
    the detector is judged on the attacked item.  None when nothing was
    injected on the target (0/0 is reported absent, not zero).
    """
    injected = frozenset(truth.target_actions())
    if not injected:
        return None
    hit = len(injected & frozenset(flagged))
    return hit / len(injected)


def false_alarm_rate(
    flagged: Iterable[RatingAction], truth: InjectionRecord | None, dataset: Dataset
) -> float:
    """Fraction of the dataset's normal actions that were wrongly flagged.

    ``dataset`` should be scoped to the evaluated items.  Injected
    actions (if the truth record is given) are excluded from both the
    flagged set and the normal-action denominator.
    """
    injected = truth.action_set() if truth is not None else frozenset()
    normal_total = sum(
        1 for a in dataset.iter_actions() if a not in injected
    )
    if normal_total == 0:
        return 0.0
    false = len(frozenset(flagged) - injected)
    return false / normal_total


def classify_items(dataset: Dataset) -> dict[int, str]:
    """Split items into fad / fashion / style / scallop.

    Two median splits: the rating-count axis (many = count above the
    median count) and the time-concentration axis (concentrated =
    interquartile timestamp span, relative to the full dataset span, at
    or below the median ratio).  Concentrated+few -> fad,
    concentrated+many -> fashion, scattered+few -> style,
    scattered+many -> scallop.
    """
    if dataset.n_items == 0:
        return {}
    all_ts = [a.ts for a in dataset.iter_actions()]
    full_span = max(all_ts) - min(all_ts)
    counts: dict[int, int] = {}
    ratios: dict[int, float] = {}
    for item, h in dataset.histories.items():
        counts[item] = len(h)
        ts = np.array(h.timestamps(), dtype=np.int64)
        lo, hi = np.percentile(ts, [25.0, 75.0])
        ratios[item] = float(hi - lo) / full_span if full_span > 0 else 0.0
    count_median = statistics.median(counts.values())
    ratio_median = statistics.median(ratios.values())
    classes: dict[int, str] = {}
    for item in dataset.items:
        many = counts[item] > count_median
        concentrated = ratios[item] <= ratio_median
        if concentrated:
            classes[item] = "fashion" if many else "fad"
        else:
            classes[item] = "scallop" if many else "style"
    return classes


@dataclass(frozen=True)
class ExperimentProtocol:
    """Factorial run description; every random draw derives from ``seed``."""

    items_sample: int = 50
    attack_sizes: tuple[int, ...] = (10, 20, 30, 40, 50)
    filler_sizes: tuple[float, ...] = (0.0,)
    models: tuple[str, ...] = ("random",)
    directions: tuple[str, ...] = ("push",)
    repetitions: int = 10
    alpha_hours: float = 0.389
    beta: int = 10
    max_span: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.items_sample < 0:
            raise ValueError("items_sample must be >= 0")
        if self.repetitions < 0:
            raise ValueError("repetitions must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")

    def cells(self) -> list[tuple[str, str, int, float]]:
        return [
            (model, direction, size, filler)
            for model in self.models
            for direction in self.directions
            for size in self.attack_sizes
            for filler in self.filler_sizes
        ]


def sweep_protocol(seed: int = 0, repetitions: int = 10) -> ExperimentProtocol:
    """Default protocol for threshold sweeps: 50 push attacks, no filler,
    no length guard on the splitter (beta 0)."""
    return ExperimentProtocol(
        attack_sizes=(50,),
        filler_sizes=(0.0,),
        models=("random",),
        directions=("push",),
        repetitions=repetitions,
        beta=0,
        seed=seed,
    )


@dataclass(frozen=True)
class CellMetrics:
    model: str
    direction: str
    attack_size: int
    filler_size: float
    alpha_hours: float
    beta: int
    item_class: str
    detection_rate: float | None
    false_alarm_rate: float | None
    n_injected: int
    n_normal: int


@dataclass(frozen=True)
class ItemMetrics:
    item_class: str
    detection_rate: float | None
    false_alarm_rate: float | None


@dataclass(frozen=True)
class EvalReport:
    protocol: ExperimentProtocol
    sampled_items: tuple[int, ...]
    cells: tuple[CellMetrics, ...]
    per_item: dict[int, ItemMetrics]

    @property
    def detection_rate(self) -> float | None:
        vals = [
            c.detection_rate
            for c in self.cells
            if c.item_class == "all" and c.detection_rate is not None
        ]
        return sum(vals) / len(vals) if vals else None

    @property
    def false_alarm_rate(self) -> float | None:
        vals = [
            c.false_alarm_rate
            for c in self.cells
            if c.item_class == "all" and c.false_alarm_rate is not None
        ]
        return sum(vals) / len(vals) if vals else None

    def class_metrics(self, item_class: str) -> tuple[float | None, float | None]:
        det = [
            c.detection_rate
            for c in self.cells
            if c.item_class == item_class and c.detection_rate is not None
        ]
        fa = [
            c.false_alarm_rate
            for c in self.cells
            if c.item_class == item_class and c.false_alarm_rate is not None
        ]
        return (
            sum(det) / len(det) if det else None,
            sum(fa) / len(fa) if fa else None,
        )

    def to_json_dict(self) -> dict:
        return {
            "schema": EVAL_JSON_SCHEMA,
            "protocol": asdict(self.protocol),
            "sampled_items": list(self.sampled_items),
            "overall": {
                "detection_rate": self.detection_rate,
                "false_alarm_rate": self.false_alarm_rate,
            },
            "cells": [asdict(c) for c in self.cells],
            "per_item": {
                str(item): asdict(m) for item, m in sorted(self.per_item.items())
            },
        }


class _Tally:
    """Detected/injected/false/normal counters."""

    __slots__ = ("detected", "injected", "false", "normal")

    def __init__(self) -> None:
        self.detected = 0
        self.injected = 0
        self.false = 0
        self.normal = 0

    def add(self, detected: int, injected: int, false: int, normal: int) -> None:
        self.detected += detected
        self.injected += injected
        self.false += false
        self.normal += normal

    def rates(self) -> tuple[float | None, float | None]:
        det = self.detected / self.injected if self.injected else None
        fa = self.false / self.normal if self.normal else None
        return det, fa


def _mean_or_none(values: list[float | None]) -> float | None:
    defined = [v for v in values if v is not None]
    return sum(defined) / len(defined) if defined else None


def run_experiment(dataset: Dataset, protocol: ExperimentProtocol) -> EvalReport:
    """Run the factorial protocol; see the module docstring for accounting."""
    items = dataset.items
    if protocol.items_sample > len(items):
        raise ValueError(
            f"cannot sample {protocol.items_sample} items from {len(items)}"
        )
    classes = classify_items(dataset)
    sample_rng = np.random.default_rng(np.random.SeedSequence([protocol.seed, 1]))
    sampled = tuple(
        sorted(
            int(x)
            for x in sample_rng.choice(
                np.array(items, dtype=np.int64), size=protocol.items_sample, replace=False
            )
        )
    )
    part_cfg = PartitionConfig(
        gap_spread_limit=float(hours_to_seconds(protocol.alpha_hours)),
        min_split_length=protocol.beta,
    )
    bandwagon_pick = (
        (most_rated_item(dataset),) if "bandwagon" in protocol.models else ()
    )

    cell_rows: list[CellMetrics] = []
    item_tally: dict[int, _Tally] = {item: _Tally() for item in sampled}

    for cell_idx, (model, direction, size, filler) in enumerate(protocol.cells()):
        rep_rates: dict[str, list[tuple[float | None, float | None]]] = {
            cls: [] for cls in ("all",) + ITEM_CLASSES
        }
        cell_totals = {cls: _Tally() for cls in ("all",) + ITEM_CLASSES}
        for rep in range(protocol.repetitions):
            tallies = {cls: _Tally() for cls in ("all",) + ITEM_CLASSES}
            for item in sampled:
                seed_seq = np.random.SeedSequence(
                    [protocol.seed, 2, cell_idx, rep, item]
                )
                cfg = AttackConfig(
                    model=model,
                    direction=direction,
                    attack_size=size,
                    target_item=item,
                    filler_size=filler,
                    selected_items=bandwagon_pick if model == "bandwagon" else (),
                    max_span=protocol.max_span,
                )
                record = generate_attack(dataset, cfg, seed_seq)
                target_injected = frozenset(record.target_actions())
                original = dataset.histories[item]
                if target_injected:
                    augmented = RatingHistory.from_actions(
                        item, original.actions + tuple(target_injected)
                    )
                else:
                    augmented = original
                report = detect_item(augmented, part_cfg, direction)
                flagged = frozenset(report.flagged_actions())
                detected = len(flagged & target_injected)
                false = len(flagged - target_injected)
                counts = (detected, len(target_injected), false, len(original))
                tallies["all"].add(*counts)
                tallies[classes[item]].add(*counts)
                item_tally[item].add(*counts)
            for cls, tally in tallies.items():
                rep_rates[cls].append(tally.rates())
                cell_totals[cls].add(tally.detected, tally.injected, tally.false, tally.normal)
        for cls in ("all",) + ITEM_CLASSES:
            det = _mean_or_none([r[0] for r in rep_rates[cls]])
            fa = _mean_or_none([r[1] for r in rep_rates[cls]])
            cell_rows.append(
                CellMetrics(
                    model=model,
                    direction=direction,
                    attack_size=size,
                    filler_size=filler,
                    alpha_hours=protocol.alpha_hours,
                    beta=protocol.beta,
                    item_class=cls,
                    detection_rate=det,
                    false_alarm_rate=fa,
                    n_injected=cell_totals[cls].injected,
                    n_normal=cell_totals[cls].normal,
                )
            )

    per_item = {
        item: ItemMetrics(classes[item], *item_tally[item].rates()) for item in sampled
    }
    return EvalReport(
        protocol=protocol,
        sampled_items=sampled,
        cells=tuple(cell_rows),
        per_item=per_item,
    )


@dataclass(frozen=True)
class SweepRow:
    alpha_hours: float
    item_class: str
    detection_rate: float | None
    false_alarm_rate: float | None


def sweep_alpha(
    dataset: Dataset, alphas_hours: Sequence[float], protocol: ExperimentProtocol
) -> list[SweepRow]:
    """One metric row per threshold per item class.

    Per-run seeds do not depend on the threshold, so the same attacks are
    replayed at every threshold and the sweep isolates the threshold's
    effect.  An empty threshold list gives an empty table.
    """
    rows: list[SweepRow] = []
    for alpha in alphas_hours:
        report = run_experiment(dataset, replace(protocol, alpha_hours=alpha))
        for cls in ITEM_CLASSES:
            det, fa = report.class_metrics(cls)
            rows.append(SweepRow(alpha, cls, det, fa))
    return rows


def _fmt(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_eval_csv(report: EvalReport, fp: TextIO) -> None:
    fp.write(",".join(EVAL_CSV_COLUMNS) + "\n")
    for c in report.cells:
        fp.write(
            ",".join(
                (
                    c.model,
                    c.direction,
                    str(c.attack_size),
                    _fmt(c.filler_size),
                    _fmt(c.alpha_hours),
                    str(c.beta),
                    c.item_class,
                    _fmt(c.detection_rate),
                    _fmt(c.false_alarm_rate),
                )
            )
            + "\n"
        )


def write_eval_json(report: EvalReport, fp: TextIO) -> None:
    json.dump(report.to_json_dict(), fp, sort_keys=True, indent=2)
    fp.write("\n")


def write_sweep_csv(rows: Iterable[SweepRow], fp: TextIO) -> None:
    fp.write(",".join(SWEEP_CSV_COLUMNS) + "\n")
    for r in rows:
        fp.write(
            ",".join(
                (_fmt(r.alpha_hours), r.item_class, _fmt(r.detection_rate), _fmt(r.false_alarm_rate))
            )
            + "\n"
        )


def write_sweep_json(
    rows: Iterable[SweepRow], protocol: ExperimentProtocol, fp: TextIO
) -> None:
    payload = {
        "schema": SWEEP_JSON_SCHEMA,
        "protocol": asdict(protocol),
        "rows": [asdict(r) for r in rows],
    }
    json.dump(payload, fp, sort_keys=True, indent=2)
    fp.write("\n")
