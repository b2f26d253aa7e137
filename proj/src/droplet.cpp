#include "inkjet/droplet.hpp"

#include <array>
#include <cmath>

#include "inkjet/util.hpp"

namespace inkjet {

std::array<double, kDropletStatCount> DropletStats::as_array() const {
  return {area_mean,  area_std,  area_p25,  area_p50,  area_p75,
          perim_mean, perim_std, perim_p25, perim_p50, perim_p75};
}

const std::array<const char*, kDropletStatCount>& DropletStats::stat_names() {
  static const std::array<const char*, kDropletStatCount> kNames = {
      "area_mean",  "area_std",  "area_p25",  "area_p50",  "area_p75",
      "perim_mean", "perim_std", "perim_p25", "perim_p50", "perim_p75"};
  return kNames;
}

std::vector<Droplet> find_droplets(const InkMask& mask) {
  const int w = mask.width, h = mask.height;
  std::vector<int32_t> label(size_t(w) * h, -1);
  std::vector<Droplet> out;
  std::vector<int32_t> stack;

  static constexpr int dx8[] = {-1, 0, 1, -1, 1, -1, 0, 1};
  static constexpr int dy8[] = {-1, -1, -1, 0, 0, 1, 1, 1};

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      size_t idx = size_t(y) * w + x;
      if (!mask.mask[idx] || label[idx] >= 0) continue;
      int32_t id = int32_t(out.size());
      Droplet d;
      long sum_x = 0, sum_y = 0;
      stack.clear();
      stack.push_back(int32_t(idx));
      label[idx] = id;
      while (!stack.empty()) {
        int32_t cur = stack.back();
        stack.pop_back();
        int cx = cur % w, cy = cur / w;
        d.area += 1;
        sum_x += cx;
        sum_y += cy;
        // 4-neighbour edges to background or image border
        if (cx == 0 || !mask.at(cx - 1, cy)) ++d.perimeter;
        if (cx == w - 1 || !mask.at(cx + 1, cy)) ++d.perimeter;
        if (cy == 0 || !mask.at(cx, cy - 1)) ++d.perimeter;
        if (cy == h - 1 || !mask.at(cx, cy + 1)) ++d.perimeter;
        for (int k = 0; k < 8; ++k) {
          int nx = cx + dx8[k], ny = cy + dy8[k];
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          size_t nidx = size_t(ny) * w + nx;
          if (mask.mask[nidx] && label[nidx] < 0) {
            label[nidx] = id;
            stack.push_back(int32_t(nidx));
          }
        }
      }
      d.centroid_x = double(sum_x) / double(d.area);
      d.centroid_y = double(sum_y) / double(d.area);
      out.push_back(d);
    }
  }
  return out;
}

namespace {

struct FiveStats {
  double mean, std_dev, p25, p50, p75;
};

FiveStats five_stats(std::vector<double>& values) {
  FiveStats s{};
  s.mean = mean_of(values);
  s.std_dev = std::sqrt(variance_of(values, s.mean));
  std::sort(values.begin(), values.end());
  s.p25 = percentile_sorted(values, 25.0);
  s.p50 = percentile_sorted(values, 50.0);
  s.p75 = percentile_sorted(values, 75.0);
  return s;
}

}  // namespace

DropletStats droplet_stats(const std::vector<Droplet>& droplets) {
  DropletStats s;
  s.droplet_count = long(droplets.size());
  if (droplets.empty()) return s;  // all zeros, keeps the feature layout fixed
  std::vector<double> areas, perims;
  areas.reserve(droplets.size());
  perims.reserve(droplets.size());
  for (const Droplet& d : droplets) {
    areas.push_back(double(d.area));
    perims.push_back(double(d.perimeter));
  }
  FiveStats a = five_stats(areas);
  FiveStats p = five_stats(perims);
  s.area_mean = a.mean;
  s.area_std = a.std_dev;
  s.area_p25 = a.p25;
  s.area_p50 = a.p50;
  s.area_p75 = a.p75;
  s.perim_mean = p.mean;
  s.perim_std = p.std_dev;
  s.perim_p25 = p.p25;
  s.perim_p50 = p.p50;
  s.perim_p75 = p.p75;
  return s;
}

bool passes_filter(const std::vector<Droplet>& droplets, const CropFilter& filter) {
  return long(droplets.size()) >= filter.min_droplets;
}

}  // namespace inkjet
