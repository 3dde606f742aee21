"""Synthetic rating-log generator.

Stands in for the MovieLens 100k log when the real file is not available:
same shape (943 users, 1682 items, ~100k ratings on a 1-5 scale over
roughly seven months) with heavy-tailed item popularity, item-dependent
rating quality, and item-dependent temporal concentration so that the
fad/fashion/style/scallop taxonomy has something to bite on.

Everything is driven by one seed; identical seeds give identical logs.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset, RatingAction

DEFAULT_SEED = 20240
DEFAULT_START_TS = 874_000_000
DEFAULT_SPAN = 18_000_000  # ~208 days


def make_synthetic_dataset(
    seed: int = DEFAULT_SEED,
    n_users: int = 943,
    n_items: int = 1682,
    n_ratings: int = 100_000,
    start_ts: int = DEFAULT_START_TS,
    span_seconds: int = DEFAULT_SPAN,
) -> Dataset:
    rng = np.random.default_rng(seed)

    # Heavy-tailed popularity: lognormal weights give a median item a few
    # dozen ratings and the most popular a few hundred.
    weights = rng.lognormal(mean=0.0, sigma=1.0, size=n_items)
    weights /= weights.sum()

    # Per-item rating quality and temporal profile.  The release time
    # anchors the item's activity; the decay scale controls whether its
    # ratings bunch up (days) or stretch out (months).  Item means are
    # clipped to the range real 1-5 logs exhibit, and per-rating noise
    # matches their typical within-item spread.
    quality = np.clip(rng.normal(3.55, 0.45, size=n_items), 1.6, 4.5)
    release = start_ts + rng.integers(0, int(span_seconds * 0.8), size=n_items)
    decay = rng.lognormal(mean=np.log(2.0e6), sigma=1.2, size=n_items)

    item_idx = rng.choice(n_items, size=n_ratings, p=weights)
    users = rng.integers(1, n_users + 1, size=n_ratings)
    ratings = np.clip(
        np.rint(quality[item_idx] + rng.normal(0.0, 1.15, size=n_ratings)), 1, 5
    ).astype(np.int64)
    ts = (release[item_idx] + rng.exponential(1.0, size=n_ratings) * decay[item_idx]).astype(
        np.int64
    )

    # One rating per (user, item) pair, like a real rating log.
    key = users.astype(np.int64) * (n_items + 1) + item_idx
    _, first = np.unique(key, return_index=True)
    keep = np.sort(first)

    actions = [
        RatingAction(
            item=int(item_idx[k]) + 1,
            user=int(users[k]),
            rating=int(ratings[k]),
            ts=int(ts[k]),
        )
        for k in keep
    ]
    return Dataset.from_actions(actions)
