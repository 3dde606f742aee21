import json

import pytest

from shillscan import save_dataset
from shillscan.cli import _alpha_range, main


@pytest.fixture()
def cache(tmp_path, small_dataset):
    path = tmp_path / "cache.jsonl"
    save_dataset(small_dataset, str(path), fmt="jsonl")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestAlphaRange:
    def test_comma_list(self):
        assert _alpha_range("0.2,0.389") == [0.2, 0.389]

    def test_inclusive_range(self):
        vals = _alpha_range("0.1:1.0:0.05")
        assert len(vals) == 19
        assert vals[0] == 0.1 and vals[-1] == 1.0


class TestIngest:
    def test_summary_line_and_cache(self, tmp_path, small_dataset, capsys):
        raw = tmp_path / "u.data"
        with open(raw, "w", encoding="utf-8") as fp:
            for a in small_dataset.iter_actions():
                fp.write(f"{a.user}\t{a.item}\t{a.rating}\t{a.ts}\n")
        out_cache = tmp_path / "out.jsonl"
        code, out, _ = run(
            capsys, "ingest", str(raw), "--min-ratings", "10", "--out", str(out_cache)
        )
        assert code == 0
        n_items, n_users, n_ratings = small_dataset.n_items, small_dataset.n_users, small_dataset.n_ratings
        assert out.strip() == f"{n_items} items, {n_users} users, {n_ratings} ratings"
        assert out_cache.exists()

    def test_empty_file(self, tmp_path, capsys):
        raw = tmp_path / "empty.data"
        raw.write_text("")
        code, out, _ = run(capsys, "ingest", str(raw))
        assert code == 0 and out.startswith("0 items")

    def test_malformed_file_nonzero_exit(self, tmp_path, capsys):
        raw = tmp_path / "bad.data"
        raw.write_text("1\t1\tsix\t10\n")
        code, _, err = run(capsys, "ingest", str(raw))
        assert code == 1
        assert "line 1" in err

    def test_unreadable_path(self, capsys):
        code, _, err = run(capsys, "ingest", "/nonexistent/u.data")
        assert code == 1 and err


class TestDetect:
    def test_item_filter_and_stream(self, cache, small_dataset, capsys):
        item = small_dataset.items[0]
        code, out, _ = run(capsys, "detect", cache, "--items", str(item))
        assert code == 0
        lines = [json.loads(s) for s in out.strip().splitlines()]
        # both directions by default
        assert [l["direction"] for l in lines] == ["push", "nuke"]
        assert all(l["item"] == item for l in lines)

    def test_single_direction_all_items(self, cache, small_dataset, tmp_path, capsys):
        out_path = tmp_path / "reports.jsonl"
        code, _, _ = run(
            capsys, "detect", cache, "--direction", "push", "--out", str(out_path)
        )
        assert code == 0
        lines = out_path.read_text().strip().splitlines()
        assert len(lines) == small_dataset.n_items

    def test_unknown_item(self, cache, capsys):
        code, _, err = run(capsys, "detect", cache, "--items", "99999")
        assert code == 1 and "99999" in err


class TestInject:
    def test_deterministic_outputs(self, cache, small_dataset, tmp_path, capsys):
        target = small_dataset.items[0]
        args = (
            "inject", cache, "--model", "average", "--direction", "push",
            "--attack-size", "50", "--target", str(target), "--seed", "7",
        )
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        assert run(capsys, *args, "--out", str(a))[0] == 0
        assert run(capsys, *args, "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_merged_out_grows_target(self, cache, small_dataset, tmp_path, capsys):
        target = small_dataset.items[0]
        rec = tmp_path / "rec.jsonl"
        merged = tmp_path / "merged.jsonl"
        code, out, _ = run(
            capsys, "inject", cache, "--model", "random", "--direction", "nuke",
            "--attack-size", "10", "--target", str(target), "--seed", "1",
            "--out", str(rec), "--merged-out", str(merged),
        )
        assert code == 0
        assert "10 injected actions in 10 profiles" in out
        from shillscan import load_dataset

        d2 = load_dataset(str(merged), fmt="jsonl")
        assert len(d2.histories[target]) == len(small_dataset.histories[target]) + 10


class TestEvaluate:
    def test_protocol_mode_writes_both_files(self, cache, tmp_path, capsys):
        prefix = str(tmp_path / "ev")
        code, out, _ = run(
            capsys, "evaluate", cache, "--items-sample", "5", "--attack-sizes", "5",
            "--repetitions", "1", "--seed", "3", "--out-prefix", prefix,
        )
        assert code == 0
        assert (tmp_path / "ev.csv").exists() and (tmp_path / "ev.json").exists()
        assert "detection_rate=" in out

    def test_determinism_byte_identical(self, cache, tmp_path, capsys):
        args = (
            "evaluate", cache, "--items-sample", "5", "--attack-sizes", "5,10",
            "--repetitions", "2", "--seed", "9",
        )
        p1, p2 = str(tmp_path / "r1"), str(tmp_path / "r2")
        assert run(capsys, *args, "--out-prefix", p1)[0] == 0
        assert run(capsys, *args, "--out-prefix", p2)[0] == 0
        assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()
        assert (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()

    def test_no_attacks_reports_absent_detection(self, cache, tmp_path, capsys):
        prefix = str(tmp_path / "clean")
        code, out, _ = run(
            capsys, "evaluate", cache, "--items-sample", "5", "--attack-sizes", "0",
            "--repetitions", "1", "--seed", "3", "--out-prefix", prefix,
        )
        assert code == 0
        assert "detection_rate=absent" in out
        obj = json.loads((tmp_path / "clean.json").read_text())
        assert obj["overall"]["detection_rate"] is None
        assert obj["overall"]["false_alarm_rate"] is not None

    def test_score_mode(self, cache, small_dataset, tmp_path, capsys):
        target = small_dataset.items[0]
        rec = tmp_path / "rec.jsonl"
        merged = tmp_path / "merged.jsonl"
        run(
            capsys, "inject", cache, "--model", "random", "--direction", "push",
            "--attack-size", "30", "--target", str(target), "--seed", "5",
            "--out", str(rec), "--merged-out", str(merged),
        )
        reports = tmp_path / "reports.jsonl"
        run(
            capsys, "detect", str(merged), "--direction", "push",
            "--items", str(target), "--out", str(reports),
        )
        code, out, _ = run(
            capsys, "evaluate", str(merged), "--reports", str(reports), "--truth", str(rec)
        )
        assert code == 0
        metrics = json.loads(out.strip().splitlines()[-1])
        assert set(metrics) == {"detection_rate", "false_alarm_rate"}
        assert metrics["detection_rate"] is not None

    def test_score_mode_needs_both_files(self, cache, capsys):
        code, _, err = run(capsys, "evaluate", cache, "--truth", "x.jsonl")
        assert code == 1 and "score mode" in err


class TestSweepAlpha:
    def test_rows_per_alpha_per_class(self, cache, tmp_path, capsys):
        prefix = str(tmp_path / "sw")
        code, out, _ = run(
            capsys, "sweep-alpha", cache, "--alphas", "0.2,0.389",
            "--items-sample", "4", "--repetitions", "1", "--seed", "2",
            "--out-prefix", prefix,
        )
        assert code == 0
        lines = (tmp_path / "sw.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + 2 * 4
        assert "8 sweep rows over 2 thresholds" in out

    def test_sweep_determinism(self, cache, tmp_path, capsys):
        args = (
            "sweep-alpha", cache, "--alphas", "0.389", "--items-sample", "4",
            "--repetitions", "1", "--seed", "2",
        )
        p1, p2 = str(tmp_path / "s1"), str(tmp_path / "s2")
        run(capsys, *args, "--out-prefix", p1)
        run(capsys, *args, "--out-prefix", p2)
        assert (tmp_path / "s1.csv").read_bytes() == (tmp_path / "s2.csv").read_bytes()
        assert (tmp_path / "s1.json").read_bytes() == (tmp_path / "s2.json").read_bytes()
