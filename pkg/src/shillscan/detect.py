"""Pairwise window comparison and abnormal-window detection.

Every pair of windows of one item is compared with a modified two-sample
T statistic.  The usual sample means are replaced by "amplified" means:
the window's rating sum divided by the number of distinct rating values
present (``rk``), which stretches the contrast between a burst of
identical ratings and ordinary mixed-rating traffic.  ``rk`` also plays
the role of the sample size, so degrees of freedom stay in [0, 8] and the
95% two-tailed critical values can be table-driven.

A window is reported abnormal when it is inconsistent with at least an
average number of its peers (row count of 1-flags), no longer than the
average window, and at least as large as the average window.  Inside an
abnormal window, the suspect ratings are the ones at or above the window
mean (push direction) or at or below it (nuke direction).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .data import RatingAction, RatingHistory
from .segment import PartitionConfig, TimeWindow, WindowPartition, partition_history

DIRECTIONS = ("push", "nuke")

# Two-tailed 95% critical values of the t distribution, df 1..8.
CRITICAL_VALUES: dict[int, float] = {
    1: 12.71,
    2: 4.303,
    3: 3.182,
    4: 2.776,
    5: 2.571,
    6: 2.447,
    7: 2.365,
    8: 2.306,
}


def critical_value(df: int) -> float:
    """95% two-tailed boundary for ``df`` in 1..8."""
    if df not in CRITICAL_VALUES:
        raise ValueError(f"degrees of freedom {df} outside 1..8")
    return CRITICAL_VALUES[df]


@dataclass(frozen=True)
class WindowStats:
    """Per-window rating statistics.

    ``modified_mean`` is the rating sum divided by ``rk`` (distinct rating
    values), so ``modified_mean * rk == mean * g`` exactly.  ``variance``
    is the population variance about the ordinary mean.
    """

    g: int
    rk: int
    modified_mean: float
    mean: float
    variance: float


def window_stats(window: TimeWindow, history: RatingHistory) -> WindowStats:
    ratings = [a.rating for a in history.actions[window.start : window.end]]
    g = len(ratings)
    rk = len(set(ratings))
    total = sum(ratings)
    mean = total / g
    variance = sum((r - mean) ** 2 for r in ratings) / g
    return WindowStats(g=g, rk=rk, modified_mean=total / rk, mean=mean, variance=variance)


@dataclass(frozen=True)
class PairResult:
    """One window-vs-window comparison: T value, df, boundary, 0/1 flag."""

    t_value: float
    df: int
    boundary: float
    flag: int


def t_statistic(i: WindowStats, j: WindowStats, a0: float, ai: float) -> PairResult:
    """Modified two-sample T comparison of window i against window j.

    ``a0`` is the rating mean of the entire history; ``ai`` the mean of
    the history excluding window i.  When both windows hold a single
    rating kind the degrees of freedom are 0 and the pair defaults to
    consistent (flag 0).
    """
    df = i.rk + j.rk - 2
    if df == 0:
        return PairResult(t_value=0.0, df=0, boundary=0.0, flag=0)
    numerator = i.modified_mean - j.modified_mean - (a0 - ai)
    # The denominator vanishes only when both windows have one rating
    # kind, which is the df == 0 branch above.
    denominator = math.sqrt(i.g * i.variance + j.g * j.variance)
    scale = math.sqrt(i.rk * j.rk * df / (i.rk + j.rk))
    t = numerator / denominator * scale
    boundary = CRITICAL_VALUES[df]
    return PairResult(t_value=t, df=df, boundary=boundary, flag=1 if abs(t) > boundary else 0)


@dataclass(frozen=True)
class PairwiseFlagMatrix:
    """All ordered window-pair results plus per-row 1-flag counts.

    ``results[i][j]`` compares window i against window j; the diagonal is
    identically zero.  ``z[i]`` counts the 1-flags in row i.
    """

    results: tuple[tuple[PairResult, ...], ...]
    z: tuple[int, ...]

    def flags(self) -> list[list[int]]:
        return [[r.flag for r in row] for row in self.results]


def flag_matrix(partition: WindowPartition, history: RatingHistory) -> PairwiseFlagMatrix:
    """Compare every ordered window pair of one item.

    The row-i correction term uses the history mean without window i, so
    the matrix is not symmetric in value.  A single-window partition
    yields a 1x1 zero matrix.
    """
    windows = partition.windows
    m = len(windows)
    stats = [window_stats(w, history) for w in windows]
    n = len(history.actions)
    total = sum(a.rating for a in history.actions)
    a0 = total / n

    rows = []
    for i in range(m):
        si = stats[i]
        rest = n - si.g
        # Excluding the only window leaves nothing; the correction term
        # then vanishes (ai = a0).
        ai = a0 if rest == 0 else (total - si.mean * si.g) / rest
        row = []
        for j in range(m):
            if i == j:
                df = 2 * si.rk - 2
                bound = CRITICAL_VALUES[df] if df >= 1 else 0.0
                row.append(PairResult(t_value=0.0, df=df, boundary=bound, flag=0))
            else:
                row.append(t_statistic(si, stats[j], a0, ai))
        rows.append(tuple(row))
    z = tuple(sum(r.flag for r in row) for row in rows)
    return PairwiseFlagMatrix(tuple(rows), z)


def detect_abnormal_windows(
    partition: WindowPartition, matrix: PairwiseFlagMatrix
) -> set[int]:
    """Indices of windows flagged abnormal.

    A window qualifies when its 1-flag count is at least the mean count,
    its duration at most the mean duration, and its size at least the
    mean size.  The method is comparative, so the two degenerate cases
    where every window would tie are suppressed: a single window, and all
    windows identical in (flag count, duration, size).
    """
    windows = partition.windows
    m = len(windows)
    if m <= 1:
        return set()
    if len({(matrix.z[i], windows[i].wd, windows[i].ws) for i in range(m)}) == 1:
        return set()
    mean_z = sum(matrix.z) / m
    mean_wd = sum(w.wd for w in windows) / m
    mean_ws = sum(w.ws for w in windows) / m
    return {
        i
        for i in range(m)
        if matrix.z[i] >= mean_z and windows[i].wd <= mean_wd and windows[i].ws >= mean_ws
    }


def extract_abnormal_ratings(
    history: RatingHistory, window: TimeWindow, direction: str
) -> list[RatingAction]:
    """Suspect actions inside an abnormal window.

    Push attacks inflate ratings, so the suspects are those at or above
    the window mean; nuke attacks deflate, so at or below.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    acts = history.actions[window.start : window.end]
    mean = sum(a.rating for a in acts) / len(acts)
    if direction == "push":
        return [a for a in acts if a.rating >= mean]
    return [a for a in acts if a.rating <= mean]


@dataclass(frozen=True)
class DetectionReport:
    """End-to-end detection result for one item and one attack direction."""

    item: int
    direction: str
    partition: WindowPartition
    z: tuple[int, ...]
    abnormal_windows: tuple[int, ...]
    flagged: dict[int, tuple[RatingAction, ...]]

    def flagged_actions(self) -> list[RatingAction]:
        out: list[RatingAction] = []
        for idx in self.abnormal_windows:
            out.extend(self.flagged[idx])
        return out

    def to_json_dict(self) -> dict:
        windows = []
        for idx, w in enumerate(self.partition.windows):
            windows.append(
                {
                    "start_ts": w.first_ts,
                    "end_ts": w.last_ts,
                    "ws": w.ws,
                    "wd": w.wd,
                    "rk": w.rk,
                    "z": self.z[idx],
                    "abnormal": idx in self.abnormal_windows,
                }
            )
        flagged = [
            {"item": a.item, "rating": a.rating, "ts": a.ts, "user": a.user, "window": idx}
            for idx in self.abnormal_windows
            for a in self.flagged[idx]
        ]
        return {
            "item": self.item,
            "direction": self.direction,
            "windows": windows,
            "flagged": flagged,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def detect_item(
    history: RatingHistory, config: PartitionConfig, direction: str
) -> DetectionReport:
    """Segment one item's history, compare windows, and flag suspects."""
    partition = partition_history(history, config)
    matrix = flag_matrix(partition, history)
    abnormal = sorted(detect_abnormal_windows(partition, matrix))
    flagged = {
        idx: tuple(extract_abnormal_ratings(history, partition.windows[idx], direction))
        for idx in abnormal
    }
    return DetectionReport(
        item=history.item,
        direction=direction,
        partition=partition,
        z=matrix.z,
        abnormal_windows=tuple(abnormal),
        flagged=flagged,
    )
