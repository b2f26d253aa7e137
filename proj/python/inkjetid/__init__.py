"""Inkjet printer model identification from droplet statistics."""

from ._core import (
    CROP_SIZE,
    LAYOUT_VERSION,
    NUM_FEATURES,
    Model,
    band_stats,
    dft_1d,
    dwt_multilevel_1d,
    extract_features,
    feature_names,
    find_droplets,
    make_ink_mask,
    render_synthetic,
    stft_1d,
    subset_indices,
    to_grayscale,
    top_n_f1,
)

__all__ = [
    "CROP_SIZE",
    "LAYOUT_VERSION",
    "NUM_FEATURES",
    "Model",
    "band_stats",
    "dft_1d",
    "dwt_multilevel_1d",
    "extract_features",
    "feature_names",
    "find_droplets",
    "make_ink_mask",
    "render_synthetic",
    "stft_1d",
    "subset_indices",
    "to_grayscale",
    "top_n_f1",
]
