"""Fake-profile attack generation and injection.

An attack is a set of fake user profiles.  Each profile rates the target
item at the extreme (5 to push, 1 to nuke), optionally rates a sample of
filler items to mimic a normal user, and, for the bandwagon model, rates
a list of popular "selected" items at 5.  All of a profile's ratings land
inside a short injection span (default 1000 seconds) so the burst mimics
a real attack's timing.

Filler rating values per model:

* ``random``    -- uniform integers in [1, 5].
* ``average``   -- the filler item's dataset mean, rounded to the nearest
                   integer (ties to even) and clamped to [1, 5].
* ``bandwagon`` -- uniform integers in [1, 5], plus the selected items at 5.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .data import Dataset, RatingAction

MODELS = ("random", "average", "bandwagon")
DIRECTIONS = ("push", "nuke")

R_MAX = 5
R_MIN = 1

DEFAULT_MAX_SPAN = 1000


@dataclass(frozen=True)
class AttackConfig:
    model: str
    direction: str
    attack_size: int
    target_item: int
    filler_size: float = 0.0
    selected_items: tuple[int, ...] = ()
    injection_start: int | None = None
    max_span: int = DEFAULT_MAX_SPAN

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if self.attack_size < 0:
            raise ValueError("attack_size must be >= 0")
        if not 0.0 <= self.filler_size <= 1.0:
            raise ValueError("filler_size must be in [0, 1]")
        if self.max_span <= 0:
            raise ValueError("max_span must be > 0")
        if (self.model == "bandwagon") != bool(self.selected_items):
            raise ValueError("selected_items must be nonempty iff model is 'bandwagon'")


@dataclass(frozen=True)
class InjectionRecord:
    """The injected actions plus ground-truth profile labels.

    ``profile_of[k]`` is the 0-based profile index of ``actions[k]``; the
    number of distinct labels equals the attack size.
    """

    target_item: int
    direction: str
    actions: tuple[RatingAction, ...]
    profile_of: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.actions) != len(self.profile_of):
            raise ValueError("actions and profile_of must be parallel")

    @property
    def n_profiles(self) -> int:
        return len(set(self.profile_of))

    def users(self) -> frozenset[int]:
        return frozenset(a.user for a in self.actions)

    def target_actions(self) -> list[RatingAction]:
        return [a for a in self.actions if a.item == self.target_item]

    def action_set(self) -> frozenset[RatingAction]:
        return frozenset(self.actions)


def most_rated_item(dataset: Dataset) -> int:
    """The item with the largest rating count (smallest id on ties)."""
    return max(dataset.items, key=lambda i: (len(dataset.histories[i]), -i))


def _item_mean_rating(dataset: Dataset, item: int) -> float:
    h = dataset.histories[item]
    return sum(a.rating for a in h.actions) / len(h)


def _rounded_mean_rating(dataset: Dataset, item: int) -> int:
    return int(min(R_MAX, max(R_MIN, round(_item_mean_rating(dataset, item)))))


def generate_attack(
    dataset: Dataset,
    config: AttackConfig,
    seed: int | np.random.SeedSequence | np.random.Generator,
) -> InjectionRecord:
    """Build ``attack_size`` fake profiles against ``config.target_item``.

    Fake user ids start just above the dataset's largest real user id.
    Each profile samples its own filler items (floor(filler_size * |I|)
    of them, drawn without replacement from the non-target, non-selected
    pool) and draws every action timestamp uniformly inside
    [injection_start, injection_start + max_span].  When
    ``injection_start`` is None it is sampled uniformly from the target's
    historical time range, held back ``max_span`` from the range end so
    the burst embeds inside real traffic.  Identical (dataset, config,
    seed) inputs reproduce the record exactly.
    """
    if config.target_item not in dataset.histories:
        raise ValueError(f"target item {config.target_item} not in dataset")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    start = config.injection_start
    if start is None:
        ts = dataset.histories[config.target_item].timestamps()
        hi = max(ts[0], ts[-1] - config.max_span)
        start = int(rng.integers(ts[0], hi + 1))

    items = dataset.items
    selected = set(config.selected_items)
    pool = [i for i in items if i != config.target_item and i not in selected]
    n_filler = math.floor(config.filler_size * len(items))
    if n_filler > len(pool):
        raise ValueError(
            f"filler count {n_filler} exceeds available pool of {len(pool)} items"
        )
    for s in selected:
        if s not in dataset.histories:
            raise ValueError(f"selected item {s} not in dataset")

    target_rating = R_MAX if config.direction == "push" else R_MIN
    first_fake_user = max(dataset.users, default=0) + 1
    pool_arr = np.array(pool, dtype=np.int64)

    mean_cache: dict[int, int] = {}
    actions: list[RatingAction] = []
    labels: list[int] = []

    def stamp() -> int:
        return int(rng.integers(start, start + config.max_span + 1))

    for p in range(config.attack_size):
        user = first_fake_user + p
        actions.append(
            RatingAction(item=config.target_item, user=user, rating=target_rating, ts=stamp())
        )
        labels.append(p)
        for s in config.selected_items:
            actions.append(RatingAction(item=s, user=user, rating=R_MAX, ts=stamp()))
            labels.append(p)
        if n_filler:
            fillers = rng.choice(pool_arr, size=n_filler, replace=False)
            for f in sorted(int(x) for x in fillers):
                if config.model == "average":
                    if f not in mean_cache:
                        mean_cache[f] = _rounded_mean_rating(dataset, f)
                    rating = mean_cache[f]
                else:
                    rating = int(rng.integers(R_MIN, R_MAX + 1))
                actions.append(RatingAction(item=f, user=user, rating=rating, ts=stamp()))
                labels.append(p)

    order = sorted(range(len(actions)), key=lambda k: (actions[k].ts, actions[k].user, actions[k].item))
    return InjectionRecord(
        target_item=config.target_item,
        direction=config.direction,
        actions=tuple(actions[k] for k in order),
        profile_of=tuple(labels[k] for k in order),
    )


def inject(dataset: Dataset, record: InjectionRecord) -> Dataset:
    """Merge an injection record into a dataset.

    Fake user ids must be disjoint from the dataset's users.  Original
    actions are untouched; per-item histories are re-sorted.
    """
    collisions = record.users() & dataset.users
    if collisions:
        raise ValueError(f"user-id collision on {sorted(collisions)[:5]}")
    merged = list(dataset.iter_actions())
    merged.extend(record.actions)
    return Dataset.from_actions(merged)


def write_injection_record(record: InjectionRecord, fp: TextIO) -> None:
    """JSON-lines serialization; each action carries its profile label."""
    header = {
        "direction": record.direction,
        "kind": "injection-record",
        "target_item": record.target_item,
    }
    fp.write(json.dumps(header, sort_keys=True) + "\n")
    for a, label in zip(record.actions, record.profile_of):
        fp.write(
            json.dumps(
                {"item": a.item, "label": label, "rating": a.rating, "ts": a.ts, "user": a.user},
                sort_keys=True,
            )
            + "\n"
        )


def read_injection_record(lines: Iterable[str]) -> InjectionRecord:
    it = iter(lines)
    try:
        header = json.loads(next(it))
    except StopIteration:
        raise ValueError("empty injection record file") from None
    if header.get("kind") != "injection-record":
        raise ValueError("not an injection record file (missing header line)")
    actions: list[RatingAction] = []
    labels: list[int] = []
    for line in it:
        if not line.strip():
            continue
        obj = json.loads(line)
        actions.append(
            RatingAction(item=obj["item"], user=obj["user"], rating=obj["rating"], ts=obj["ts"])
        )
        labels.append(obj["label"])
    return InjectionRecord(
        target_item=header["target_item"],
        direction=header["direction"],
        actions=tuple(actions),
        profile_of=tuple(labels),
    )
