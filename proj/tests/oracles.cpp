#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace inkjet::oracle {

std::vector<std::complex<double>> brute_dft(std::span<const double> x) {
  const size_t t = x.size();
  std::vector<std::complex<double>> out(t);
  for (size_t k = 0; k < t; ++k) {
    std::complex<double> sum = 0.0;
    for (size_t n = 0; n < t; ++n) {
      double ang = -2.0 * M_PI * double(k) * double(n) / double(t);
      sum += x[n] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = sum;
  }
  return out;
}

std::vector<double> inverse_dwt_step(const std::vector<double>& approx,
                                     const std::vector<double>& detail,
                                     const WaveletFilter& f, BoundaryMode mode,
                                     int target_len) {
  const int taps = f.taps();
  const int half = int(approx.size());
  if (approx.size() != detail.size())
    throw std::invalid_argument("inverse_dwt_step: band length mismatch");

  if (mode == BoundaryMode::Periodic) {
    const int n = (target_len % 2 == 0) ? target_len : target_len + 1;
    std::vector<double> out(size_t(n), 0.0);
    for (int i = 0; i < half; ++i)
      for (int j = 0; j < taps; ++j) {
        int t = (2 * i + j) % n;
        out[size_t(t)] += approx[size_t(i)] * f.lo[size_t(j)] +
                          detail[size_t(i)] * f.hi[size_t(j)];
      }
    out.resize(size_t(target_len));
    return out;
  }

  // adjoint scatter over the extended domain, then crop the interior
  std::vector<double> scatter(size_t(2 * half + taps - 1), 0.0);
  for (int i = 0; i < half; ++i)
    for (int j = 0; j < taps; ++j)
      scatter[size_t(2 * i + 1 + j)] += approx[size_t(i)] * f.lo[size_t(j)] +
                                        detail[size_t(i)] * f.hi[size_t(j)];
  std::vector<double> out(size_t(target_len), 0.0);
  for (int t = 0; t < target_len; ++t) out[size_t(t)] = scatter[size_t(taps - 1 + t)];
  return out;
}

std::vector<double> inverse_dwt_multilevel(const std::vector<std::vector<double>>& bands,
                                           const WaveletFilter& f, BoundaryMode mode,
                                           const std::vector<int>& lengths) {
  const int levels = int(bands.size()) - 1;
  if (int(lengths.size()) != levels)
    throw std::invalid_argument("inverse_dwt_multilevel: need one length per level");
  std::vector<double> approx = bands.front();
  // bands = [approx_L, detail_L, ..., detail_1]; lengths recorded top-down
  for (int l = 0; l < levels; ++l) {
    const auto& detail = bands[size_t(1 + l)];
    int target = lengths[size_t(levels - 1 - l)];
    approx = inverse_dwt_step(approx, detail, f, mode, target);
  }
  return approx;
}

std::vector<ComponentStats> flood_fill_components(const InkMask& mask) {
  const int w = mask.width, h = mask.height;
  std::vector<int> label(size_t(w) * h, -1);
  std::vector<ComponentStats> out;
  std::vector<std::pair<int, int>> stack;
  // column-major scan, unlike the library's row-major discovery order
  for (int x = 0; x < w; ++x)
    for (int y = 0; y < h; ++y) {
      if (!mask.at(x, y) || label[size_t(y) * w + x] >= 0) continue;
      int id = int(out.size());
      out.emplace_back();
      stack.clear();
      stack.emplace_back(x, y);
      label[size_t(y) * w + x] = id;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        out[size_t(id)].area += 1;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            if (mask.at(nx, ny) && label[size_t(ny) * w + nx] < 0) {
              label[size_t(ny) * w + nx] = id;
              stack.emplace_back(nx, ny);
            }
          }
      }
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int id = label[size_t(y) * w + x];
      if (id < 0) continue;
      if (x == 0 || !mask.at(x - 1, y)) ++out[size_t(id)].perimeter;
      if (x == w - 1 || !mask.at(x + 1, y)) ++out[size_t(id)].perimeter;
      if (y == 0 || !mask.at(x, y - 1)) ++out[size_t(id)].perimeter;
      if (y == h - 1 || !mask.at(x, y + 1)) ++out[size_t(id)].perimeter;
    }
  return out;
}

}  // namespace inkjet::oracle
