import io

import pytest

from shillscan import (
    Dataset,
    LogParseError,
    RatingAction,
    RatingHistory,
    UndefinedGapSeriesError,
    build_gap_series,
    filter_sparse_items,
    parse_rating_log,
    write_rating_log,
)


def history(item, stamps, ratings=None, users=None):
    ratings = ratings or [3] * len(stamps)
    users = users or list(range(1, len(stamps) + 1))
    return RatingHistory.from_actions(
        item, [RatingAction(item, u, r, t) for u, r, t in zip(users, ratings, stamps)]
    )


class TestParse:
    def test_single_line(self):
        d = parse_rating_log(["196\t242\t3\t881250949\n"])
        assert d.n_items == 1 and d.n_users == 1 and d.n_ratings == 1
        a = d.histories[242].actions[0]
        assert (a.user, a.rating, a.ts) == (196, 3, 881250949)

    def test_non_integer_rating_reports_line(self):
        with pytest.raises(LogParseError) as err:
            parse_rating_log(["1\t1\tsix\t10\n"])
        assert err.value.line_no == 1
        assert "line 1" in str(err.value)

    def test_rating_out_of_range(self):
        with pytest.raises(LogParseError) as err:
            parse_rating_log(["1\t1\t3\t5\n", "2\t1\t6\t9\n"])
        assert err.value.line_no == 2

    def test_wrong_field_count(self):
        with pytest.raises(LogParseError):
            parse_rating_log(["1\t1\t3\n"])

    def test_empty_input_is_empty_dataset(self):
        d = parse_rating_log([])
        assert d.n_items == 0 and d.n_ratings == 0

    def test_jsonl_format(self):
        d = parse_rating_log(
            ['{"user": 7, "item": 9, "rating": 5, "ts": 100}\n'], fmt="jsonl"
        )
        assert d.histories[9].actions[0].user == 7

    def test_jsonl_malformed(self):
        with pytest.raises(LogParseError) as err:
            parse_rating_log(["{not json}\n"], fmt="jsonl")
        assert err.value.line_no == 1

    def test_jsonl_missing_field(self):
        with pytest.raises(LogParseError):
            parse_rating_log(['{"user": 1, "item": 2, "rating": 3}\n'], fmt="jsonl")

    def test_histories_sorted_with_user_tiebreak(self):
        d = parse_rating_log(
            ["5\t1\t3\t100\n", "2\t1\t4\t100\n", "9\t1\t1\t50\n"]
        )
        acts = d.histories[1].actions
        assert [(a.ts, a.user) for a in acts] == [(50, 9), (100, 2), (100, 5)]


class TestRoundTrip:
    @pytest.mark.parametrize("fmt", ["udata", "jsonl"])
    def test_parse_serialize_parse(self, fmt, small_dataset):
        buf = io.StringIO()
        write_rating_log(small_dataset, buf, fmt=fmt)
        again = parse_rating_log(io.StringIO(buf.getvalue()), fmt=fmt)
        assert again == small_dataset


class TestFilterSparseItems:
    def _three_items(self):
        actions = []
        for item, count in [(1, 5), (2, 10), (3, 20)]:
            for k in range(count):
                actions.append(RatingAction(item, k + 1, 3, 1000 + k))
        return Dataset.from_actions(actions)

    def test_threshold_inclusive(self):
        d = filter_sparse_items(self._three_items(), 10)
        assert d.items == [2, 3]
        assert d.n_ratings == 30

    def test_zero_threshold_is_identity(self):
        d = self._three_items()
        assert filter_sparse_items(d, 0) == d

    def test_survivors_untouched(self):
        d = self._three_items()
        filtered = filter_sparse_items(d, 10)
        assert filtered.histories[3] == d.histories[3]

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError):
            filter_sparse_items(self._three_items(), -1)


class TestGapSeries:
    def test_basic(self):
        g = build_gap_series(history(1, [0, 10, 20, 1000]))
        assert g.gaps == (10, 10, 980)
        assert g.mid_times == (5, 15, 510)

    def test_duplicate_timestamps(self):
        g = build_gap_series(history(1, [100, 100]))
        assert g.gaps == (0,)
        assert g.mid_times == (100,)

    def test_floor_of_half(self):
        g = build_gap_series(history(1, [0, 7]))
        assert g.gaps == (7,)
        assert g.mid_times == (3,)

    def test_too_short(self):
        with pytest.raises(UndefinedGapSeriesError):
            build_gap_series(history(1, [5]))

    def test_gap_sum_equals_span(self, small_dataset):
        for item in small_dataset.items[:40]:
            h = small_dataset.histories[item]
            if len(h) < 2:
                continue
            g = build_gap_series(h)
            assert sum(g.gaps) == h.actions[-1].ts - h.actions[0].ts


class TestMovieLens:
    """Published-figure checks; run only when a real u.data is supplied."""

    def test_full_log_figures(self, movielens_path):
        if not movielens_path:
            pytest.skip("no local MovieLens 100k copy")
        from shillscan import load_dataset

        d = load_dataset(movielens_path, fmt="udata")
        assert (d.n_users, d.n_items, d.n_ratings) == (943, 1682, 100_000)
        filtered = filter_sparse_items(d, 10)
        assert (filtered.n_items, filtered.n_users, filtered.n_ratings) == (
            1152,
            943,
            97_953,
        )


class TestRatingAction:
    def test_invalid_rating(self):
        with pytest.raises(ValueError):
            RatingAction(1, 1, 0, 10)
        with pytest.raises(ValueError):
            RatingAction(1, 1, 6, 10)

    def test_negative_timestamp(self):
        with pytest.raises(ValueError):
            RatingAction(1, 1, 3, -1)

    def test_history_rejects_foreign_item(self):
        with pytest.raises(ValueError):
            RatingHistory.from_actions(1, [RatingAction(2, 1, 3, 0)])
