#pragma once

#include <vector>

#include "inkjet/preprocess.hpp"

namespace inkjet {

struct Droplet {
  long area = 0;       // pixel count of the component
  long perimeter = 0;  // component-pixel edges adjacent to background/border
  double centroid_x = 0.0;
  double centroid_y = 0.0;
};

inline constexpr int kDropletStatCount = 10;

struct DropletStats {
  double area_mean = 0.0, area_std = 0.0;
  double area_p25 = 0.0, area_p50 = 0.0, area_p75 = 0.0;
  double perim_mean = 0.0, perim_std = 0.0;
  double perim_p25 = 0.0, perim_p50 = 0.0, perim_p75 = 0.0;
  long droplet_count = 0;

  std::array<double, kDropletStatCount> as_array() const;
  static const std::array<const char*, kDropletStatCount>& stat_names();
};

struct CropFilter {
  long min_droplets = 10;
  Channel channel = Channel::Gray;
};

// One droplet per 8-connected ink component, ordered row-major by the
// component's first pixel.
std::vector<Droplet> find_droplets(const InkMask& mask);

// Table-style aggregation; an empty droplet list yields all-zero stats.
DropletStats droplet_stats(const std::vector<Droplet>& droplets);

bool passes_filter(const std::vector<Droplet>& droplets, const CropFilter& filter);

}  // namespace inkjet
