"""Run a scaled-down factorial experiment and a threshold sweep.

Twenty sampled items, three repetitions: detection and false-alarm rates
per attack size, a per-class breakdown, and the detection/false-alarm
curve over a range of gap-spread thresholds (the CSV behind the curve is
what the sweep-alpha CLI subcommand writes).
"""

from dataclasses import replace

from shillscan import (
    ExperimentProtocol,
    filter_sparse_items,
    make_synthetic_dataset,
    run_experiment,
    sweep_alpha,
    sweep_protocol,
)

dataset = filter_sparse_items(make_synthetic_dataset(), 10)

protocol = ExperimentProtocol(
    items_sample=20,
    attack_sizes=(10, 30, 50),
    repetitions=3,
    directions=("push",),
    seed=7,
)
report = run_experiment(dataset, protocol)

print("per-size metrics (all classes):")
for cell in report.cells:
    if cell.item_class == "all":
        print(f"  size {cell.attack_size:2d}: detection={cell.detection_rate:.3f} "
              f"false-alarm={cell.false_alarm_rate:.4f}")

print("\nper-class detection at size 50:")
for cell in report.cells:
    if cell.attack_size == 50 and cell.item_class != "all":
        det = "n/a" if cell.detection_rate is None else f"{cell.detection_rate:.3f}"
        print(f"  {cell.item_class:8s}: {det}")

alphas = [0.1, 0.2, 0.389, 0.8, 2.0]
rows = sweep_alpha(dataset, alphas, replace(sweep_protocol(seed=7, repetitions=2), items_sample=20))
print("\nthreshold sweep (class = fad):")
print("  alpha_h  detection  false_alarm")
for row in rows:
    if row.item_class == "fad" and row.detection_rate is not None:
        print(f"  {row.alpha_hours:7.3f}  {row.detection_rate:9.3f}  {row.false_alarm_rate:11.4f}")
