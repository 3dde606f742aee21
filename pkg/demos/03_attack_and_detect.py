"""Inject a fake-profile attack into the log and catch it.

Generates 25 push profiles against one target item inside a 1000-second
span, merges them into the dataset, then runs the detector on the target
and scores the result against the ground-truth labels.
"""

from shillscan import (
    AttackConfig,
    PartitionConfig,
    detect_item,
    detection_rate,
    false_alarm_rate,
    filter_sparse_items,
    generate_attack,
    inject,
    make_synthetic_dataset,
    Dataset,
)

dataset = filter_sparse_items(make_synthetic_dataset(), 10)
target = next(i for i in dataset.items if 40 <= len(dataset.histories[i]) <= 80)
print(f"target item {target}: {len(dataset.histories[target])} real ratings")

config = AttackConfig(
    model="average",
    direction="push",
    attack_size=25,
    target_item=target,
    filler_size=0.03,
)
record = generate_attack(dataset, config, seed=2024)
print(f"injected {len(record.actions)} actions across {record.n_profiles} profiles "
      f"({len(record.target_actions())} on the target)")

attacked = inject(dataset, record)
report = detect_item(attacked.histories[target], PartitionConfig(), "push")
print(f"windows: {[w.ws for w in report.partition.windows]}")
print(f"abnormal windows: {list(report.abnormal_windows)}")

flagged = report.flagged_actions()
scope = Dataset.from_actions(attacked.histories[target].actions)
print(f"detection rate: {detection_rate(flagged, record):.3f}")
print(f"false alarm rate on the target: {false_alarm_rate(flagged, record, scope):.3f}")
