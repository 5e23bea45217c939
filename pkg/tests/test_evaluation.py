import csv
import math

import numpy as np
import pytest

from shadesearch.evaluation import (
    EvalResult,
    emit_report,
    generate_synthetic_corpus,
    make_eval_row,
    precision,
    recall,
    run_experiment,
)
from shadesearch.image import RgbImage, encode_ppm
from shadesearch.indexing import build_index

# Published per-category relevant-retrieved counts at 12 retrieved out of
# 14 relevant, with the percentages as printed (rounding varies by row).
WITH_SHADING = {"1": (6, 50.0, 43.0), "2": (6, 50.0, 43.0), "3": (10, 83.0, 71.0),
                "4": (9, 75.0, 64.0), "5": (7, 58.0, 50.0)}
WITHOUT_SHADING = {"1": (4, 33.3, 28.57), "2": (1, 8.3, 7.1), "3": (9, 75.0, 64.5),
                   "4": (6, 50.0, 42.0), "5": (5, 41.0, 35.0)}


def constant_image(color, side=8) -> RgbImage:
    return RgbImage(np.full((side, side, 3), color, dtype=np.uint8))


def write_corpus(root, images: dict[str, RgbImage]) -> None:
    for rel, img in images.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(encode_ppm(img))


def brute_force_rows(index, k: int, query_mode: str) -> dict[str, tuple[int, int, int]]:
    """Independent evaluation: normalize by hand, sort all distances, count labels."""
    feats = {e.path: e.features for e in index.entries}
    cats = {e.path: e.category for e in index.entries}
    mins, maxs = index.normalizer.mins, index.normalizer.maxs

    def norm(v):
        return [
            (x - lo) / (hi - lo) if hi > lo else 0.0
            for x, lo, hi in zip(v, mins, maxs)
        ]

    paths = sorted(feats)
    by_cat: dict[str, list[str]] = {}
    for p in paths:
        by_cat.setdefault(cats[p], []).append(p)
    depth = min(k, len(paths) - 1)
    rows = {}
    for cat in sorted(by_cat):
        members = by_cat[cat]
        queries = members[:1] if query_mode == "per_category_first" else members
        rr = tot = rel = 0
        for q in queries:
            scored = sorted(
                (math.dist(norm(feats[q]), norm(feats[p])), p)
                for p in paths
                if p != q
            )
            top = scored[:depth]
            rr += sum(1 for _, p in top if cats[p] == cat)
            tot += len(top)
            rel += len(members) - 1
        rows[cat] = (rr, tot, rel)
    return rows


class TestPrecisionRecall:
    def test_published_precision_values(self):
        assert precision(10, 12) == pytest.approx(0.8333, abs=5e-5)  # printed 83%
        assert precision(6, 12) == 0.5  # printed 50%
        assert precision(0, 12) == 0.0

    def test_published_recall_values(self):
        assert recall(10, 14) == pytest.approx(0.7143, abs=5e-5)  # printed 71%
        assert recall(14, 14) == 1.0
        assert recall(0, 14) == 0.0

    def test_zero_retrieved_undefined(self):
        with pytest.raises(ValueError, match="precision"):
            precision(0, 0)

    def test_zero_relevant_undefined(self):
        with pytest.raises(ValueError, match="recall"):
            recall(0, 0)

    def test_counts_out_of_range(self):
        with pytest.raises(ValueError):
            precision(13, 12)
        with pytest.raises(ValueError):
            recall(15, 14)


class TestEvalRow:
    def test_ratios_match_counts_exactly(self):
        row = make_eval_row("cat", 10, 12, 14)
        assert row.precision == row.relevant_retrieved / row.retrieved
        assert row.recall == row.relevant_retrieved / row.relevant_in_db

    def test_inconsistent_counts_rejected(self):
        with pytest.raises(ValueError):
            make_eval_row("cat", 13, 12, 14)


class TestRunExperiment:
    def separable_corpus(self, tmp_path):
        colors = {"reds": (250, 10, 10), "greens": (10, 250, 10), "blues": (10, 10, 250)}
        images = {}
        for cat, color in colors.items():
            for i in range(4):
                # tiny per-image offset keeps features distinct within a category
                shade = tuple(max(0, c - 2 * i) for c in color)
                images[f"{cat}/{i:02d}.ppm"] = constant_image(shade)
        write_corpus(tmp_path, images)
        return build_index(tmp_path)

    def test_perfectly_separable_categories(self, tmp_path):
        index = self.separable_corpus(tmp_path)
        result = run_experiment(index, k=3, query_mode="all_queries_averaged")
        assert all(row.precision == 1.0 and row.recall == 1.0 for row in result.rows)

    def test_single_category_corpus(self, tmp_path):
        write_corpus(
            tmp_path,
            {f"only/{i}.ppm": constant_image((100 + i, 50, 50)) for i in range(5)},
        )
        index = build_index(tmp_path)
        result = run_experiment(index, k=4, query_mode="per_category_first")
        assert result.rows[0].precision == 1.0

    def test_matches_brute_force_with_collisions(self, tmp_path):
        images = {
            "alpha/a0.ppm": constant_image((200, 10, 10)),
            "alpha/a1.ppm": constant_image((200, 10, 10)),  # duplicate inside alpha
            "alpha/a2.ppm": constant_image((190, 10, 10)),
            "beta/b0.ppm": constant_image((10, 10, 200)),
            "beta/b1.ppm": constant_image((10, 10, 195)),
            "beta/b2.ppm": constant_image((10, 10, 190)),
            "gamma/g0.ppm": constant_image((200, 10, 10)),  # collides with alpha
            "gamma/g1.ppm": constant_image((10, 200, 10)),
            "gamma/g2.ppm": constant_image((10, 195, 10)),
        }
        write_corpus(tmp_path, images)
        index = build_index(tmp_path)
        for mode in ("per_category_first", "all_queries_averaged"):
            for k in (2, 4, 8):
                result = run_experiment(index, k=k, query_mode=mode)
                expected = brute_force_rows(index, k, mode)
                got = {
                    r.category: (r.relevant_retrieved, r.retrieved, r.relevant_in_db)
                    for r in result.rows
                }
                assert got == expected

    def test_mode_reflects_index_shading(self, tmp_path):
        index = self.separable_corpus(tmp_path)
        assert run_experiment(index, k=2).mode == "unshaded"

    def test_deterministic(self, tmp_path):
        index = self.separable_corpus(tmp_path)
        assert run_experiment(index, k=3) == run_experiment(index, k=3)

    def test_rejects_bad_k(self, tmp_path):
        index = self.separable_corpus(tmp_path)
        with pytest.raises(ValueError):
            run_experiment(index, k=0)

    def test_rejects_unknown_mode(self, tmp_path):
        index = self.separable_corpus(tmp_path)
        with pytest.raises(ValueError, match="query_mode"):
            run_experiment(index, k=2, query_mode="sideways")


def table_results() -> tuple[EvalResult, EvalResult]:
    shaded = EvalResult(
        k=12, mode="shaded",
        rows=tuple(make_eval_row(cat, rr, 12, 14) for cat, (rr, _, _) in WITH_SHADING.items()),
    )
    unshaded = EvalResult(
        k=12, mode="unshaded",
        rows=tuple(make_eval_row(cat, rr, 12, 14) for cat, (rr, _, _) in WITHOUT_SHADING.items()),
    )
    return shaded, unshaded


class TestEmitReport:
    def test_csv_reproduces_percentages_to_one_decimal(self, tmp_path):
        shaded, unshaded = table_results()
        csv_path, html_path = emit_report(shaded, unshaded, tmp_path)
        with open(csv_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 10
        for row in rows:
            counts = WITH_SHADING if row["mode"] == "shaded" else WITHOUT_SHADING
            rr = counts[row["category"]][0]
            assert int(row["relevant_retrieved"]) == rr
            assert float(row["precision"]) == rr / 12
            assert float(row["recall"]) == rr / 14
            assert round(float(row["precision"]) * 100, 1) == round(rr / 12 * 100, 1)
        html = html_path.read_text()
        assert "83.3" in html and "8.3" in html  # rendered to one decimal

    def test_emitting_twice_is_byte_identical(self, tmp_path):
        shaded, unshaded = table_results()
        first = emit_report(shaded, unshaded, tmp_path / "one")
        second = emit_report(shaded, unshaded, tmp_path / "two")
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes()

    def test_mismatched_categories_rejected(self, tmp_path):
        shaded, unshaded = table_results()
        clipped = EvalResult(k=12, mode="unshaded", rows=unshaded.rows[:3])
        with pytest.raises(ValueError, match="categor"):
            emit_report(shaded, clipped, tmp_path)

    def test_empty_rows_rejected(self, tmp_path):
        shaded = EvalResult(k=12, mode="shaded", rows=())
        unshaded = EvalResult(k=12, mode="unshaded", rows=())
        with pytest.raises(ValueError):
            emit_report(shaded, unshaded, tmp_path)

    def test_swapped_arguments_rejected(self, tmp_path):
        shaded, unshaded = table_results()
        with pytest.raises(ValueError, match="shaded"):
            emit_report(unshaded, shaded, tmp_path)


def tree_bytes(root) -> dict[str, bytes]:
    return {
        p.relative_to(root).as_posix(): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestSyntheticCorpus:
    def test_identical_seeds_are_byte_identical(self, tmp_path):
        generate_synthetic_corpus(tmp_path / "one", seed=7)
        generate_synthetic_corpus(tmp_path / "two", seed=7)
        assert tree_bytes(tmp_path / "one") == tree_bytes(tmp_path / "two")

    def test_structure(self, tmp_path):
        generate_synthetic_corpus(tmp_path / "c", seed=3)
        files = tree_bytes(tmp_path / "c")
        assert len(files) == 70
        categories = {path.split("/")[0] for path in files}
        assert len(categories) == 5
        for cat in categories:
            assert sum(1 for p in files if p.startswith(f"{cat}/")) == 14

    def test_distinct_seeds_differ(self, tmp_path):
        generate_synthetic_corpus(tmp_path / "one", seed=1)
        generate_synthetic_corpus(tmp_path / "two", seed=2)
        assert tree_bytes(tmp_path / "one") != tree_bytes(tmp_path / "two")
