#pragma once

#include "inkjet/image.hpp"

namespace inkjet {

enum class ThresholdMode { Otsu, Fixed };

struct PreprocessParams {
  double sharpen_sigma = 1.0;   // gaussian sigma of the unsharp mask
  double sharpen_amount = 1.0;  // out = in + amount * (in - blur(in))
  int denoise_window = 3;       // median filter window, odd and >= 1
  ThresholdMode threshold_mode = ThresholdMode::Otsu;
  uint16_t fixed_threshold = 128;

  void validate() const;
};

// Binary ink raster: 1 = ink (pixels at or below the threshold after
// sharpen -> denoise; ink absorbs light on white paper).
struct InkMask {
  int width = 0;
  int height = 0;
  Channel channel = Channel::Gray;
  std::vector<uint8_t> mask;

  InkMask() = default;
  InkMask(int w, int h, Channel c)
      : width(w), height(h), channel(c), mask(size_t(w) * h, 0) {}

  uint8_t at(int x, int y) const { return mask[size_t(y) * width + x]; }
  uint8_t& at(int x, int y) { return mask[size_t(y) * width + x]; }
};

// Rec.601 luma, rounded to the source bit depth.
Plane to_grayscale(const Plane& r, const Plane& g, const Plane& b);
Plane to_grayscale(const RgbImage& img);

struct ContrastFeatures {
  double y_max = 0.0;
  double y_min = 0.0;
  double contrast = 0.0;  // Michelson: (max - min) / (max + min), 0 if both 0
};
ContrastFeatures contrast_features(const Plane& gray);

// Building blocks of the ink-mask chain; exposed for tests and reuse.
Plane unsharp_mask(const Plane& p, double sigma, double amount);
Plane median_filter(const Plane& p, int window);
uint16_t otsu_threshold(const Plane& p);

InkMask make_ink_mask(const Plane& plane, const PreprocessParams& params,
                      Channel channel = Channel::Gray);

}  // namespace inkjet
