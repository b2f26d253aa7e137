#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace inkjet {

inline constexpr int kCropSize = 256;

// Single-channel raster. Pixel values live in [0, max_value]; max_value is
// 255 for 8-bit scans and 65535 for 16-bit ones.
struct Plane {
  int width = 0;
  int height = 0;
  uint16_t max_value = 255;
  std::vector<uint16_t> data;

  Plane() = default;
  Plane(int w, int h, uint16_t maxv = 255, uint16_t fill = 0)
      : width(w), height(h), max_value(maxv), data(size_t(w) * h, fill) {}

  uint16_t& at(int x, int y) { return data[size_t(y) * width + x]; }
  uint16_t at(int x, int y) const { return data[size_t(y) * width + x]; }
  size_t size() const { return data.size(); }
};

struct RgbImage {
  Plane r, g, b;

  int width() const { return r.width; }
  int height() const { return r.height; }
  uint16_t max_value() const { return r.max_value; }
};

enum class Channel { R = 0, G = 1, B = 2, Gray = 3 };
inline constexpr int kNumChannels = 4;
inline const char* channel_name(Channel c) {
  switch (c) {
    case Channel::R: return "r";
    case Channel::G: return "g";
    case Channel::B: return "b";
    default: return "gray";
  }
}

// 256x256 patch with per-channel planes. The gray plane is always the
// luminance conversion of the RGB planes.
struct Crop {
  std::array<Plane, kNumChannels> planes;  // indexed by Channel
  int x0 = 0;
  int y0 = 0;
  std::string source_scan;
  std::string label;

  const Plane& plane(Channel c) const { return planes[int(c)]; }
};

}  // namespace inkjet
