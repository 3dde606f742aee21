"""Walk through ingestion and window segmentation for one item.

Builds the synthetic rating log (or loads MovieLens 100k if you point
MOVIELENS_100K at a copy of u.data), filters sparse items, and shows how
one item's history breaks into time windows at the default thresholds.
"""

import os

from shillscan import (
    PartitionConfig,
    build_gap_series,
    filter_sparse_items,
    load_dataset,
    make_synthetic_dataset,
    partition_history,
)

path = os.environ.get("MOVIELENS_100K")
raw = load_dataset(path, fmt="udata") if path else make_synthetic_dataset()
dataset = filter_sparse_items(raw, 10)
print(f"{dataset.n_items} items, {dataset.n_users} users, {dataset.n_ratings} ratings")

# pick a mid-sized item so the output stays readable
item = next(i for i in dataset.items if 30 <= len(dataset.histories[i]) <= 60)
history = dataset.histories[item]
print(f"\nitem {item}: {len(history)} ratings spanning "
      f"{(history.actions[-1].ts - history.actions[0].ts) / 86400:.0f} days")

gaps = build_gap_series(history)
print(f"gap series: {len(gaps)} entries, largest gap {max(gaps.gaps) / 86400:.1f} days")

config = PartitionConfig()  # 0.389 h spread limit, length guard 10
partition = partition_history(history, config)
print(f"\n{len(partition.windows)} windows from {len(partition.marks)} marks:")
for k, w in enumerate(partition.windows):
    print(f"  window {k}: {w.ws:3d} ratings, {w.rk} distinct values, "
          f"{w.wd / 3600:8.1f} h long")
