#include "inkjet/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace inkjet {

void PreprocessParams::validate() const {
  if (sharpen_sigma <= 0.0)
    throw std::invalid_argument("preprocess: sharpen_sigma must be > 0");
  if (denoise_window < 1 || denoise_window % 2 == 0)
    throw std::invalid_argument("preprocess: denoise_window must be odd and >= 1");
}

Plane to_grayscale(const Plane& r, const Plane& g, const Plane& b) {
  if (r.width != g.width || r.width != b.width || r.height != g.height ||
      r.height != b.height)
    throw std::invalid_argument("to_grayscale: mismatched plane sizes");
  Plane out(r.width, r.height, r.max_value);
  for (size_t i = 0; i < out.data.size(); ++i) {
    double y = 0.299 * r.data[i] + 0.587 * g.data[i] + 0.114 * b.data[i];
    out.data[i] = uint16_t(std::lround(y));
  }
  return out;
}

Plane to_grayscale(const RgbImage& img) {
  return to_grayscale(img.r, img.g, img.b);
}

ContrastFeatures contrast_features(const Plane& gray) {
  if (gray.data.empty())
    throw std::invalid_argument("contrast_features: empty plane");
  auto [mn, mx] = std::minmax_element(gray.data.begin(), gray.data.end());
  ContrastFeatures f;
  f.y_max = double(*mx);
  f.y_min = double(*mn);
  double denom = f.y_max + f.y_min;
  f.contrast = denom > 0.0 ? (f.y_max - f.y_min) / denom : 0.0;
  return f;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  int radius = std::max(1, int(std::ceil(3.0 * sigma)));
  std::vector<double> k((size_t(2 * radius + 1)));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    double w = std::exp(-0.5 * (i / sigma) * (i / sigma));
    k[size_t(i + radius)] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

inline int clamp_idx(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

}  // namespace

Plane unsharp_mask(const Plane& p, double sigma, double amount) {
  auto kernel = gaussian_kernel(sigma);
  int radius = int(kernel.size() / 2);
  // separable blur with replicated borders
  std::vector<double> tmp(p.size()), blur(p.size());
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i)
        s += kernel[size_t(i + radius)] * p.at(clamp_idx(x + i, p.width), y);
      tmp[size_t(y) * p.width + x] = s;
    }
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i)
        s += kernel[size_t(i + radius)] * tmp[size_t(clamp_idx(y + i, p.height)) * p.width + x];
      blur[size_t(y) * p.width + x] = s;
    }
  Plane out(p.width, p.height, p.max_value);
  for (size_t i = 0; i < p.size(); ++i) {
    double v = p.data[i] + amount * (p.data[i] - blur[i]);
    v = std::clamp(v, 0.0, double(p.max_value));
    out.data[i] = uint16_t(std::lround(v));
  }
  return out;
}

Plane median_filter(const Plane& p, int window) {
  if (window == 1) return p;
  int radius = window / 2;
  Plane out(p.width, p.height, p.max_value);
  std::vector<uint16_t> buf(size_t(window) * window);
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      size_t n = 0;
      for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
          buf[n++] = p.at(clamp_idx(x + dx, p.width), clamp_idx(y + dy, p.height));
      std::nth_element(buf.begin(), buf.begin() + long(n / 2), buf.begin() + long(n));
      out.at(x, y) = buf[n / 2];
    }
  return out;
}

uint16_t otsu_threshold(const Plane& p) {
  size_t bins = size_t(p.max_value) + 1;
  std::vector<double> hist(bins, 0.0);
  for (uint16_t v : p.data) hist[v] += 1.0;
  double total = double(p.data.size());
  double sum_all = 0.0;
  for (size_t i = 0; i < bins; ++i) sum_all += double(i) * hist[i];

  // maximize between-class variance; class0 = values <= t
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  uint16_t best_t = 0;
  for (size_t t = 0; t + 1 < bins; ++t) {
    w0 += hist[t];
    sum0 += double(t) * hist[t];
    double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    double mu0 = sum0 / w0, mu1 = (sum_all - sum0) / w1;
    double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (var > best) {
      best = var;
      best_t = uint16_t(t);
    }
  }
  return best_t;  // 0 when the plane is constant
}

InkMask make_ink_mask(const Plane& plane, const PreprocessParams& params,
                      Channel channel) {
  params.validate();
  Plane sharpened = unsharp_mask(plane, params.sharpen_sigma, params.sharpen_amount);
  Plane cleaned = median_filter(sharpened, params.denoise_window);
  uint16_t threshold = params.threshold_mode == ThresholdMode::Otsu
                           ? otsu_threshold(cleaned)
                           : params.fixed_threshold;
  InkMask out(plane.width, plane.height, channel);
  for (size_t i = 0; i < cleaned.data.size(); ++i)
    out.mask[i] = cleaned.data[i] <= threshold ? 1 : 0;
  return out;
}

}  // namespace inkjet
