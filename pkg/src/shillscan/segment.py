"""Dynamic segmentation of a rating history into time windows.

An injected rating burst is dense: many ratings inside a tiny interval of
an item's lifetime.  To isolate such bursts, the history's gap series is
split recursively at its largest gap.  A segment stops splitting once it
is short (length <= ``min_split_length``) or its gaps are already nearly
uniform (max - min <= ``gap_spread_limit``).  The mid-time of every gap
chosen as a split point becomes a mark; sorted marks cut the history into
windows.

The recursion is run on an explicit stack so pathological gap series
cannot hit the interpreter's recursion limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .data import RatingHistory, build_gap_series


def hours_to_seconds(hours: float) -> int:
    """Convert an interface-level threshold in hours to integer seconds (floor)."""
    if hours < 0:
        raise ValueError("threshold hours must be >= 0")
    return math.floor(hours * 3600.0)


# Defaults: 0.389 h -> 1400 s spread limit, and segments of <= 10 gaps
# are left alone.
DEFAULT_GAP_SPREAD_HOURS = 0.389
DEFAULT_MIN_SPLIT_LENGTH = 10


@dataclass(frozen=True)
class PartitionConfig:
    """Thresholds steering the recursive split.

    gap_spread_limit: seconds; a segment keeps splitting only while the
        spread (max gap - min gap) of its gaps exceeds this.
    min_split_length: a segment keeps splitting only while it holds at
        least this many gaps; shorter segments are left alone.
    """

    gap_spread_limit: float = float(hours_to_seconds(DEFAULT_GAP_SPREAD_HOURS))
    min_split_length: int = DEFAULT_MIN_SPLIT_LENGTH

    def __post_init__(self) -> None:
        if self.gap_spread_limit < 0:
            raise ValueError("gap_spread_limit must be >= 0")
        if self.min_split_length < 0:
            raise ValueError("min_split_length must be >= 0")


@dataclass(frozen=True)
class TimeWindow:
    """A contiguous run of a history's actions.

    ``start``/``end`` index the history's action sequence (half-open).
    ``ws`` is the action count, ``wd`` the duration in seconds between
    the window's first and last action, ``rk`` the number of distinct
    rating values present.
    """

    start: int
    end: int
    ws: int
    wd: int
    rk: int
    first_ts: int
    last_ts: int


@dataclass(frozen=True)
class WindowPartition:
    """Ordered, disjoint, covering windows of one item plus the cut marks."""

    item: int
    windows: tuple[TimeWindow, ...]
    marks: tuple[int, ...]


def _make_window(history: RatingHistory, start: int, end: int) -> TimeWindow:
    acts = history.actions[start:end]
    return TimeWindow(
        start=start,
        end=end,
        ws=end - start,
        wd=acts[-1].ts - acts[0].ts,
        rk=len({a.rating for a in acts}),
        first_ts=acts[0].ts,
        last_ts=acts[-1].ts,
    )


def partition_history(history: RatingHistory, config: PartitionConfig) -> WindowPartition:
    """Split ``history`` into windows at recursively-chosen maximal gaps.

    Work stack entries are half-open index ranges into the gap series.  A
    range of at least ``min_split_length`` gaps whose gap spread exceeds
    ``gap_spread_limit`` is split at its maximum gap (first occurrence on
    ties); the max-gap entry itself joins neither sub-range, and its
    mid-time is recorded as a mark.  A single-action history yields one
    window and no marks.
    """
    n = len(history.actions)
    if n == 0:
        raise ValueError(f"item {history.item}: cannot partition an empty history")
    if n == 1:
        return WindowPartition(history.item, (_make_window(history, 0, 1),), ())

    series = build_gap_series(history)
    gaps = series.gaps
    split_positions: list[int] = []
    stack: list[tuple[int, int]] = [(0, len(gaps))]
    while stack:
        lo, hi = stack.pop()
        # A segment shorter than the length guard (and always a
        # single-gap segment) stays whole.
        if hi - lo < max(1, config.min_split_length):
            continue
        segment = gaps[lo:hi]
        if max(segment) - min(segment) <= config.gap_spread_limit:
            continue
        pos = lo + segment.index(max(segment))
        split_positions.append(pos)
        stack.append((lo, pos))
        stack.append((pos + 1, hi))

    split_positions.sort()
    marks = tuple(series.mid_times[p] for p in split_positions)

    windows: list[TimeWindow] = []
    start = 0
    for pos in split_positions:
        windows.append(_make_window(history, start, pos + 1))
        start = pos + 1
    windows.append(_make_window(history, start, n))
    return WindowPartition(history.item, tuple(windows), marks)
