import numpy as np
import pytest

from radardepth.scene.corners import CornerFeature, detect_corners
from radardepth.scene.radarsim import synthesize_radar


def white_square_image(size=64, lo=20, hi=44):
    img = np.zeros((size, size, 3))
    img[lo:hi, lo:hi, :] = 1.0
    return img


class TestDetectCorners:
    def test_constant_image_has_no_corners(self):
        assert detect_corners(np.full((32, 32, 3), 0.7), 50) == []

    def test_white_square_corners_within_one_pixel(self):
        img = white_square_image(64, 20, 44)
        corners = detect_corners(img, 50)
        assert len(corners) == 4
        # oracle: the white square's corner pixels (edges at 20..43 inclusive)
        truth = [(20, 20), (20, 43), (43, 20), (43, 43)]
        for tu, tv in truth:
            best = min(max(abs(c.u - tu), abs(c.v - tv)) for c in corners)
            assert best <= 1

    def test_max_count_respected_and_sorted(self):
        rng = np.random.default_rng(0)
        img = rng.random((64, 64, 3))
        corners = detect_corners(img, 10)
        assert len(corners) <= 10
        scores = [c.score for c in corners]
        assert scores == sorted(scores, reverse=True)

    def test_brightness_scale_invariance(self):
        img = white_square_image() * 0.8 + 0.1
        a = detect_corners(img, 20)
        b = detect_corners(img * 0.5, 20)
        assert [(c.u, c.v) for c in a] == [(c.u, c.v) for c in b]
        # scores scale by the square of the brightness factor
        for ca, cb in zip(a, b):
            assert cb.score == pytest.approx(0.25 * ca.score, rel=1e-9)

    def test_positions_in_bounds_scores_nonnegative(self):
        rng = np.random.default_rng(1)
        img = rng.random((40, 56, 3))
        for c in detect_corners(img, 50):
            assert 0 <= c.u < 56
            assert 0 <= c.v < 40
            assert c.score >= 0

    def test_grayscale_input_accepted(self):
        img = white_square_image()[:, :, 0]
        assert len(detect_corners(img, 10)) >= 4

    def test_empty_image_rejected(self):
        with pytest.raises(ValueError):
            detect_corners(np.zeros((0, 0, 3)), 10)

    def test_nms_separation(self):
        img = white_square_image()
        corners = detect_corners(img, 50)
        for i, a in enumerate(corners):
            for b in corners[i + 1:]:
                assert max(abs(a.u - b.u), abs(a.v - b.v)) > 7


class TestSynthesizeRadar:
    def depth_map(self, h=32, w=32):
        rng = np.random.default_rng(7)
        return rng.uniform(5.0, 50.0, size=(h, w)).astype(np.float32)

    def test_single_corner_forced(self):
        depth = self.depth_map()
        corners = [CornerFeature(u=10, v=12, score=1.0)]
        obs = synthesize_radar(corners, depth, rng_seed=0)
        assert len(obs) == 1
        assert obs[0].u == 10 and obs[0].v == 12
        assert obs[0].depth == float(depth[12, 10])

    def test_deterministic(self):
        depth = self.depth_map()
        corners = [CornerFeature(u=i, v=2 * i, score=float(10 - i)) for i in range(10)]
        a = synthesize_radar(corners, depth, rng_seed=[1, 2])
        b = synthesize_radar(corners, depth, rng_seed=[1, 2])
        assert a == b

    def test_k_in_range(self):
        depth = self.depth_map()
        corners = [CornerFeature(u=i, v=i, score=1.0) for i in range(20)]
        sizes = {len(synthesize_radar(corners, depth, rng_seed=i)) for i in range(100)}
        assert sizes == {1, 2, 3, 4, 5}

    def test_depth_matches_ground_truth_exactly(self):
        depth = self.depth_map()
        corners = [CornerFeature(u=i, v=31 - i, score=1.0) for i in range(12)]
        for seed in range(20):
            for o in synthesize_radar(corners, depth, rng_seed=seed):
                assert o.depth == float(depth[int(round(o.v)), int(round(o.u))])

    def test_no_duplicate_corners(self):
        depth = self.depth_map()
        corners = [CornerFeature(u=i, v=i, score=1.0) for i in range(5)]
        for seed in range(30):
            obs = synthesize_radar(corners, depth, rng_seed=seed, k_min=5, k_max=5)
            assert len({(o.u, o.v) for o in obs}) == len(obs)

    def test_empty_corners_rejected(self):
        with pytest.raises(ValueError):
            synthesize_radar([], self.depth_map(), rng_seed=0)

    def test_bad_k_range_rejected(self):
        corners = [CornerFeature(u=0, v=0, score=1.0)]
        with pytest.raises(ValueError):
            synthesize_radar(corners, self.depth_map(), rng_seed=0, k_min=3, k_max=2)
        with pytest.raises(ValueError):
            synthesize_radar(corners, self.depth_map(), rng_seed=0, k_min=0, k_max=2)
