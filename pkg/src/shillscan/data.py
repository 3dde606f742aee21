"""Rating-log domain types and ingestion.

A rating log is a stream of (user, item, rating, timestamp) events.  This
module parses the two supported on-disk formats, groups events into
per-item time-ordered histories, and derives the inter-rating gap series
that the window segmentation works on.

Supported formats (both documented in the README):

* ``udata`` -- tab-separated ``user<TAB>item<TAB>rating<TAB>timestamp``,
  one event per line (the classic MovieLens 100k layout).
* ``jsonl`` -- one JSON object per line:
  ``{"user": 196, "item": 242, "rating": 3, "ts": 881250949}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO

RATING_MIN = 1
RATING_MAX = 5

FORMATS = ("udata", "jsonl")


class LogParseError(ValueError):
    """A malformed rating-log line.  ``line_no`` is 1-based."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UndefinedGapSeriesError(ValueError):
    """Raised when a gap series is requested for a history with < 2 ratings."""


@dataclass(frozen=True, slots=True)
class RatingAction:
    """One user-item rating event.

    ``rating`` must be an integer in [1, 5]; ``ts`` is integer seconds
    since the epoch and must be non-negative.
    """

    item: int
    user: int
    rating: int
    ts: int

    def __post_init__(self) -> None:
        if not RATING_MIN <= self.rating <= RATING_MAX:
            raise ValueError(f"rating {self.rating} outside [{RATING_MIN}, {RATING_MAX}]")
        if self.ts < 0:
            raise ValueError(f"negative timestamp {self.ts}")


@dataclass(frozen=True)
class RatingHistory:
    """An item's time-ordered sequence of rating actions.

    Actions are sorted ascending by (timestamp, user) so equal timestamps
    yield a deterministic order.
    """

    item: int
    actions: tuple[RatingAction, ...]

    @classmethod
    def from_actions(cls, item: int, actions: Iterable[RatingAction]) -> "RatingHistory":
        ordered = tuple(sorted(actions, key=lambda a: (a.ts, a.user)))
        for a in ordered:
            if a.item != item:
                raise ValueError(f"action for item {a.item} in history of item {item}")
        return cls(item, ordered)

    def __len__(self) -> int:
        return len(self.actions)

    def ratings(self) -> list[int]:
        return [a.rating for a in self.actions]

    def timestamps(self) -> list[int]:
        return [a.ts for a in self.actions]


@dataclass(frozen=True)
class GapSeries:
    """Per adjacent rating pair: the time gap and its mid-time cut candidate.

    Entry j covers the pair (action j, action j+1):
    ``gap = t[j+1] - t[j]`` and ``mid_time = (t[j] + t[j+1]) // 2``.
    Mid-times are floor-rounded so they are valid integer cut positions
    inside the history's time range.
    """

    mid_times: tuple[int, ...]
    gaps: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.gaps)


def build_gap_series(history: RatingHistory) -> GapSeries:
    """Gap series of ``history``; needs at least two ratings."""
    ts = history.timestamps()
    if len(ts) < 2:
        raise UndefinedGapSeriesError(
            f"item {history.item}: gap series undefined for {len(ts)} rating(s)"
        )
    mids = tuple((a + b) // 2 for a, b in zip(ts, ts[1:]))
    gaps = tuple(b - a for a, b in zip(ts, ts[1:]))
    return GapSeries(mids, gaps)


@dataclass(frozen=True)
class Dataset:
    """A rating log grouped into per-item histories.

    ``users`` is the set of user ids observed in the retained actions; the
    item universe is ``histories.keys()``.
    """

    histories: dict[int, RatingHistory]
    users: frozenset[int]

    @classmethod
    def from_actions(cls, actions: Iterable[RatingAction]) -> "Dataset":
        by_item: dict[int, list[RatingAction]] = {}
        users: set[int] = set()
        for a in actions:
            by_item.setdefault(a.item, []).append(a)
            users.add(a.user)
        histories = {
            item: RatingHistory.from_actions(item, acts)
            for item, acts in sorted(by_item.items())
        }
        return cls(histories, frozenset(users))

    @property
    def items(self) -> list[int]:
        return sorted(self.histories)

    @property
    def n_items(self) -> int:
        return len(self.histories)

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_ratings(self) -> int:
        return sum(len(h) for h in self.histories.values())

    def iter_actions(self) -> Iterator[RatingAction]:
        for item in self.items:
            yield from self.histories[item].actions


def _parse_udata_line(line_no: int, line: str) -> RatingAction:
    parts = line.split("\t")
    if len(parts) != 4:
        raise LogParseError(line_no, f"expected 4 tab-separated fields, got {len(parts)}")
    try:
        user, item, rating, ts = (int(p) for p in parts)
    except ValueError:
        raise LogParseError(line_no, f"non-integer field in {parts!r}") from None
    try:
        return RatingAction(item=item, user=user, rating=rating, ts=ts)
    except ValueError as exc:
        raise LogParseError(line_no, str(exc)) from None


def _parse_jsonl_line(line_no: int, line: str) -> RatingAction:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise LogParseError(line_no, f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise LogParseError(line_no, "expected a JSON object")
    try:
        user, item, rating, ts = obj["user"], obj["item"], obj["rating"], obj["ts"]
    except KeyError as exc:
        raise LogParseError(line_no, f"missing field {exc.args[0]!r}") from None
    if not all(isinstance(v, int) for v in (user, item, rating, ts)):
        raise LogParseError(line_no, "user/item/rating/ts must all be integers")
    try:
        return RatingAction(item=item, user=user, rating=rating, ts=ts)
    except ValueError as exc:
        raise LogParseError(line_no, str(exc)) from None


def parse_rating_log(lines: Iterable[str], fmt: str = "udata") -> Dataset:
    """Parse a rating log into a Dataset.

    ``lines`` is any iterable of text lines (an open file works).  Blank
    lines are ignored; any malformed line raises LogParseError carrying
    its line number.  Empty input gives an empty Dataset.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown log format {fmt!r}; expected one of {FORMATS}")
    parse_line = _parse_udata_line if fmt == "udata" else _parse_jsonl_line
    actions = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip("\n").strip("\r")
        if not line.strip():
            continue
        actions.append(parse_line(line_no, line))
    return Dataset.from_actions(actions)


def load_dataset(path: str, fmt: str = "udata") -> Dataset:
    with open(path, "r", encoding="utf-8") as fp:
        return parse_rating_log(fp, fmt=fmt)


def write_rating_log(dataset: Dataset, fp: TextIO, fmt: str = "jsonl") -> None:
    """Serialize a Dataset, items ascending and actions in history order.

    The output round-trips: parsing it back yields an equal Dataset.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown log format {fmt!r}; expected one of {FORMATS}")
    for a in dataset.iter_actions():
        if fmt == "udata":
            fp.write(f"{a.user}\t{a.item}\t{a.rating}\t{a.ts}\n")
        else:
            fp.write(
                json.dumps(
                    {"item": a.item, "rating": a.rating, "ts": a.ts, "user": a.user},
                    sort_keys=True,
                )
                + "\n"
            )


def save_dataset(dataset: Dataset, path: str, fmt: str = "jsonl") -> None:
    with open(path, "w", encoding="utf-8") as fp:
        write_rating_log(dataset, fp, fmt=fmt)


def filter_sparse_items(dataset: Dataset, min_ratings: int) -> Dataset:
    """Drop items with fewer than ``min_ratings`` ratings (threshold inclusive).

    Surviving histories are kept bit-for-bit; the user universe is
    recomputed from the surviving actions.
    """
    if min_ratings < 0:
        raise ValueError("min_ratings must be >= 0")
    kept = {
        item: h for item, h in dataset.histories.items() if len(h) >= min_ratings
    }
    users = frozenset(a.user for h in kept.values() for a in h.actions)
    return Dataset(dict(sorted(kept.items())), users)
