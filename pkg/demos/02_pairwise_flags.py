"""Show the pairwise window comparison on a hand-built example.

Three look-alike windows plus a burst of identical top ratings: the
burst's amplified mean (rating sum over distinct-value count) towers over
the others, so its row and column flag while the look-alikes stay
mutually consistent.
"""

from shillscan import (
    PartitionConfig,
    RatingAction,
    RatingHistory,
    detect_item,
    flag_matrix,
    partition_history,
    window_stats,
)

stamps, ratings = [], []
t = 0
for values in ([4, 3, 4, 2, 4, 3], [4, 3, 4, 2, 4, 3], [5] * 10, [4, 3, 4, 2, 4, 3]):
    gap = 100 if len(values) == 10 else 10_000
    for v in values:
        stamps.append(t)
        ratings.append(v)
        t += gap
    t += 1_000_000

item = RatingHistory.from_actions(
    1, [RatingAction(1, u + 1, r, s) for u, (r, s) in enumerate(zip(ratings, stamps))]
)

config = PartitionConfig(gap_spread_limit=3600, min_split_length=2)
partition = partition_history(item, config)
matrix = flag_matrix(partition, item)

print("window stats:")
for k, w in enumerate(partition.windows):
    s = window_stats(w, item)
    print(f"  w{k}: size={s.g:2d} kinds={s.rk} amplified-mean={s.modified_mean:6.2f} "
          f"variance={s.variance:.3f}")

print("\nT values (row window vs column window):")
for row in matrix.results:
    print("  " + "  ".join(f"{r.t_value:8.3f}" for r in row))

print("\n0-1 flags:")
for row in matrix.flags():
    print(f"  {row}")
print(f"per-row 1-counts: {list(matrix.z)}")

report = detect_item(item, config, "push")
print(f"\nabnormal windows: {list(report.abnormal_windows)}")
print(f"flagged ratings: {[a.rating for a in report.flagged_actions()]}")
