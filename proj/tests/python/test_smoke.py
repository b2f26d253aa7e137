"""Smoke tests for the python bindings against numpy references."""

import numpy as np
import pytest

import inkjetid


def test_layout_constants():
    assert inkjetid.NUM_FEATURES == 241
    assert inkjetid.CROP_SIZE == 256
    names = inkjetid.feature_names()
    assert len(names) == 241
    assert len(set(names)) == 241
    assert len(inkjetid.subset_indices("single_channel")) == 61
    assert len(inkjetid.subset_indices("frequency_only")) == 192


def test_dft_matches_numpy():
    rng = np.random.default_rng(0)
    for n in [1, 2, 7, 32, 61, 64]:
        x = rng.uniform(-1, 1, n)
        ours = inkjetid.dft_1d(x)
        ref = np.fft.fft(x)
        assert np.max(np.abs(ours - ref)) < 1e-9 * max(1.0, np.max(np.abs(ref)))


def test_to_grayscale_rec601():
    img = np.zeros((4, 4, 3), dtype=np.uint8)
    img[..., 0] = 255
    gray = inkjetid.to_grayscale(img)
    assert gray.shape == (4, 4)
    assert np.all(gray == 76)  # round(0.299 * 255)


def test_dwt_energy_and_shapes():
    rng = np.random.default_rng(1)
    x = rng.normal(size=256)
    bands = inkjetid.dwt_multilevel_1d(x, levels=3, order=4, boundary="periodic")
    assert [len(b) for b in bands] == [32, 32, 64, 128]
    energy = sum(float(np.sum(np.square(b))) for b in bands)
    assert abs(energy - float(np.sum(np.square(x)))) / energy < 1e-8


def test_stft_shape_and_dc():
    x = np.ones(256)
    grid = inkjetid.stft_1d(x, window=64, hop=32, hann=False)
    assert grid.shape == (64, 7)
    assert np.allclose(grid[0, :], 64.0)
    assert np.max(grid[1:, :]) < 1e-9


def test_ink_mask_and_droplets():
    plane = np.full((64, 64), 255.0)
    plane[10:14, 10:14] = 0.0  # one 4x4 ink square
    mask = inkjetid.make_ink_mask(plane)
    drops = inkjetid.find_droplets(mask)
    assert drops.shape[0] == 1
    area, perimeter = drops[0, 0], drops[0, 1]
    assert area >= 4
    assert perimeter >= 8


def test_extract_features_on_synthetic_crop():
    page = inkjetid.render_synthetic(width=512, height=512, seed=3)
    assert page.shape == (512, 512, 3)
    crop = page[:256, :256].astype(np.float64)
    features = inkjetid.extract_features(crop)
    assert features.shape == (241,)
    assert np.all(np.isfinite(features))
    again = inkjetid.extract_features(crop)
    assert np.array_equal(features, again)


def test_band_stats_keys():
    stats = inkjetid.band_stats(np.array([1.0, -1.0, 1.0, -1.0]))
    assert stats["zero_cross"] == 3
    assert stats["mean"] == pytest.approx(0.0)
    assert stats["entropy"] == pytest.approx(np.log(4.0))


def test_top_n_f1_rank_rule():
    logits = np.array([[3.0, 2.0], [3.0, 2.0]])
    labels = [1, 1]
    assert inkjetid.top_n_f1(logits, labels, 1) == 0.0
    assert inkjetid.top_n_f1(logits, labels, 2) == pytest.approx(0.5)  # class 0 empty
