import numpy as np
import pytest

from radardepth.scene.terrain import (TerrainScene, height_at, make_scene,
                                      surface_normal_at, texture_at)


def flat_scene(elevation=0.0, extent=100.0, grid=32):
    hf = np.full((grid, grid), elevation)
    tex = np.full((grid, grid, 3), 0.5)
    return TerrainScene(heightfield=hf, texture=tex, extent=extent,
                        light_dir=np.array([0.0, 0.0, 1.0]))


def test_height_lookup_is_periodic():
    scene = make_scene([4, 0])
    xs = np.linspace(0, scene.extent, 17)
    ys = np.linspace(0, scene.extent, 17)
    np.testing.assert_allclose(height_at(scene, xs + scene.extent, ys),
                               height_at(scene, xs, ys), atol=1e-9)
    np.testing.assert_allclose(height_at(scene, xs, ys - scene.extent),
                               height_at(scene, xs, ys), atol=1e-9)


def test_same_seed_same_scene():
    a = make_scene([9, 2])
    b = make_scene([9, 2])
    np.testing.assert_array_equal(a.heightfield, b.heightfield)
    np.testing.assert_array_equal(a.texture, b.texture)
    assert a.extent == b.extent


def test_different_seeds_differ():
    a = make_scene([9, 2])
    b = make_scene([9, 3])
    assert not np.array_equal(a.heightfield, b.heightfield)


def test_texture_in_unit_range():
    scene = make_scene([1, 0])
    assert scene.texture.min() >= 0.0
    assert scene.texture.max() <= 1.0


def test_relief_scales_with_extent():
    # similarity check: heights are proportional to extent for a fixed shape
    scene = make_scene([3, 0])
    relief = scene.max_height - scene.min_height
    assert 0.03 * scene.extent <= relief <= 0.13 * scene.extent


def test_flat_scene_constant_height():
    scene = flat_scene(elevation=2.5)
    rng = np.random.default_rng(0)
    xs = rng.uniform(-200, 200, size=20)
    ys = rng.uniform(-200, 200, size=20)
    np.testing.assert_array_equal(height_at(scene, xs, ys), np.full(20, 2.5))


def test_flat_scene_normal_points_up():
    scene = flat_scene()
    n = surface_normal_at(scene, np.array([3.0]), np.array([4.0]))
    np.testing.assert_allclose(n, [[0.0, 0.0, 1.0]], atol=1e-12)


def test_texture_lookup_shape():
    scene = make_scene([5, 5])
    t = texture_at(scene, np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    assert t.shape == (2, 3)


def test_invariants_enforced():
    with pytest.raises(ValueError):
        TerrainScene(heightfield=np.array([[np.nan]]), texture=np.zeros((1, 1, 3)),
                     extent=1.0, light_dir=np.array([0, 0, 1.0]))
    with pytest.raises(ValueError):
        TerrainScene(heightfield=np.zeros((4, 4)), texture=np.zeros((4, 4, 3)),
                     extent=-1.0, light_dir=np.array([0, 0, 1.0]))


def test_slope_bound_bounds_bilinear_gradient():
    scene = make_scene([7, 1])
    bound = scene.slope_bound()
    rng = np.random.default_rng(1)
    xs = rng.uniform(0, scene.extent, size=500)
    ys = rng.uniform(0, scene.extent, size=500)
    eps = 1e-4 * scene.cell_size
    dhdx = (height_at(scene, xs + eps, ys) - height_at(scene, xs - eps, ys)) / (2 * eps)
    dhdy = (height_at(scene, xs, ys + eps) - height_at(scene, xs, ys - eps)) / (2 * eps)
    assert np.abs(dhdx).max() <= bound + 1e-9
    assert np.abs(dhdy).max() <= bound + 1e-9
