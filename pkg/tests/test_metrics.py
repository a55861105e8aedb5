import numpy as np
import pytest

from radardepth.metrics import (DatasetSummary, MetricAccumulator, MetricsReport,
                                abs_rel, dataset_summary, delta1, delta_ratio,
                                error_vs_depth, format_report_table, format_summary,
                                read_error_vs_depth_csv, rmse, valid_mask,
                                write_error_vs_depth_csv)


def full_mask(shape):
    return np.ones(shape, dtype=bool)


class TestAbsRel:
    def test_perfect_prediction(self):
        gt = np.full((4, 4), 3.0)
        assert abs_rel(gt, gt, full_mask((4, 4))) == 0.0

    def test_hand_case(self):
        pred = np.array([[1.1]])
        gt = np.array([[1.0]])
        assert abs_rel(pred, gt, full_mask((1, 1))) == pytest.approx(0.1, abs=1e-12)

    def test_mask_excludes_invalid_gt(self):
        pred = np.array([[1.0, 99.0]])
        gt = np.array([[1.0, 0.0]])
        mask = valid_mask(gt)
        assert abs_rel(pred, gt, mask) == 0.0

    def test_empty_mask_rejected(self):
        with pytest.raises(ValueError):
            abs_rel(np.ones((2, 2)), np.ones((2, 2)), np.zeros((2, 2), dtype=bool))


class TestDelta1:
    def test_perfect_prediction(self):
        gt = np.full((3, 3), 2.0)
        assert delta1(gt, gt, full_mask((3, 3))) == 1.0

    def test_threshold_is_strict(self):
        pred = np.array([[1.3]])
        gt = np.array([[1.0]])
        assert delta1(pred, gt, full_mask((1, 1))) == 0.0

    def test_half_within_threshold(self):
        pred = np.array([[1.2, 2.6]])
        gt = np.array([[1.0, 2.0]])
        assert delta1(pred, gt, full_mask((1, 2))) == 0.5

    def test_symmetry_in_ratio(self):
        pred = np.array([[0.5]])
        gt = np.array([[1.0]])
        assert delta1(pred, gt, full_mask((1, 1))) == 0.0  # ratio 2 either way

    def test_monotone_in_threshold(self):
        rng = np.random.default_rng(0)
        pred = rng.uniform(1, 10, (16, 16))
        gt = rng.uniform(1, 10, (16, 16))
        mask = full_mask((16, 16))
        values = [delta_ratio(pred, gt, mask, th)
                  for th in (1.25, 1.2, 1.15, 1.1, 1.05, 1.01)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            delta1(np.zeros((1, 1)), np.ones((1, 1)), full_mask((1, 1)))


class TestRmse:
    def test_perfect_prediction(self):
        gt = np.full((2, 2), 5.0)
        assert rmse(gt, gt, full_mask((2, 2))) == 0.0

    def test_constant_offset(self):
        gt = np.full((3, 3), 5.0)
        assert rmse(gt + 2.0, gt, full_mask((3, 3))) == pytest.approx(2.0, abs=1e-12)

    def test_hand_case(self):
        pred = np.array([[3.0, 4.0]])
        gt = np.array([[0.0, 0.0]])
        mask = full_mask((1, 2))
        # sqrt((9 + 16) / 2) = sqrt(12.5)
        assert rmse(pred, gt, mask) == pytest.approx(np.sqrt(12.5), abs=1e-12)


class TestScaleProperties:
    def test_absrel_delta_invariant_rmse_linear(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            pred = rng.uniform(1, 20, (8, 8))
            gt = rng.uniform(1, 20, (8, 8))
            mask = full_mask((8, 8))
            s = rng.uniform(0.1, 10)
            assert abs_rel(s * pred, s * gt, mask) == pytest.approx(
                abs_rel(pred, gt, mask), rel=1e-12)
            assert delta1(s * pred, s * gt, mask) == delta1(pred, gt, mask)
            assert rmse(s * pred, s * gt, mask) == pytest.approx(
                s * rmse(pred, gt, mask), rel=1e-12)


class TestAggregationConsistency:
    def test_pooled_equals_weighted_combination(self):
        rng = np.random.default_rng(2)
        acc = MetricAccumulator()
        frames = []
        for i in range(5):
            pred = rng.uniform(1, 30, (10, 10))
            gt = rng.uniform(1, 30, (10, 10))
            mask = rng.random((10, 10)) > 0.3
            frames.append((pred, gt, mask))
            acc.add_frame(f"f{i}", pred, gt, mask)
        report = acc.report()

        counts = [m.sum() for _, _, m in frames]
        total = sum(counts)
        absrel_w = sum(abs_rel(p, g, m) * c for (p, g, m), c in zip(frames, counts)) / total
        delta_w = sum(delta1(p, g, m) * c for (p, g, m), c in zip(frames, counts)) / total
        rmse_w = np.sqrt(sum(rmse(p, g, m) ** 2 * c
                             for (p, g, m), c in zip(frames, counts)) / total)
        assert report.absrel == pytest.approx(absrel_w, rel=1e-12)
        assert report.delta1 == pytest.approx(delta_w, rel=1e-12)
        assert report.rmse == pytest.approx(rmse_w, rel=1e-12)

    def test_radar_mean_fallback_identity(self):
        # predicting the radar mean everywhere scores mean(|m - gt| / gt)
        rng = np.random.default_rng(3)
        gt = rng.uniform(2, 40, (12, 12))
        m = 11.0
        pred = np.full_like(gt, m)
        mask = full_mask(gt.shape)
        assert abs_rel(pred, gt, mask) == pytest.approx(
            np.mean(np.abs(m - gt) / gt), rel=1e-12)


class TestReportTypes:
    def test_report_invariants(self):
        with pytest.raises(ValueError):
            MetricsReport(absrel=0.1, delta1=1.5, rmse=1.0, n_frames=0, per_frame=[])
        with pytest.raises(ValueError):
            MetricsReport(absrel=0.1, delta1=0.5, rmse=1.0, n_frames=2, per_frame=[])

    def test_summary_invariants(self):
        with pytest.raises(ValueError):
            DatasetSummary(avg_sparse_depth_count=1.0, gt_coverage_percent=150.0, n_frames=1)


class TestDatasetSummary:
    def test_single_frame(self):
        mask = np.zeros((4, 4), dtype=bool)
        mask[:2] = True  # half the pixels valid
        s = dataset_summary([(["a", "b", "c"], mask)])
        assert s.avg_sparse_depth_count == 3.0
        assert s.gt_coverage_percent == 50.0
        assert s.n_frames == 1

    def test_count_average(self):
        mask = np.ones((2, 2), dtype=bool)
        s = dataset_summary([(["x"], mask), (["x", "y", "z"], mask)])
        assert s.avg_sparse_depth_count == 2.0

    def test_format_matches_tabular_style(self):
        s = DatasetSummary(avg_sparse_depth_count=2.96, gt_coverage_percent=37.8,
                           n_frames=365)
        assert format_summary("Industrial Hall", s) == \
            "Industrial Hall: 2.96 points, 37.80 %, 365 frames"

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            dataset_summary([])


class TestErrorVsDepth:
    def test_single_frame_components(self):
        gt = np.full((4, 4), 5.0)
        pred = np.full((4, 4), 5.5)
        records = error_vs_depth([(pred, gt, full_mask((4, 4)))], subsample=1)
        assert records == [(5.0, pytest.approx(0.1, abs=1e-12))]

    def test_subsample_stride(self):
        frames = [(np.full((2, 2), float(i + 1)), np.full((2, 2), float(i + 1)),
                   full_mask((2, 2))) for i in range(25)]
        records = error_vs_depth(frames, subsample=10)
        assert [d for d, _ in records] == [1.0, 11.0, 21.0]

    def test_subsample_larger_than_frame_count(self):
        frames = [(np.ones((2, 2)), np.ones((2, 2)), full_mask((2, 2)))] * 3
        records = error_vs_depth(frames, subsample=10)
        assert len(records) == 1

    def test_csv_round_trip(self, tmp_path):
        records = [(5.0, 0.125), (7.5, 0.25)]
        path = tmp_path / "series.csv"
        write_error_vs_depth_csv(path, records)
        assert read_error_vs_depth_csv(path) == records


def test_format_report_table():
    table = format_report_table([("ours", "valset", 0.1234, 0.8, 1.5)])
    assert "ours" in table and "0.123" in table
