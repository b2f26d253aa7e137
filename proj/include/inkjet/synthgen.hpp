#pragma once

#include <functional>
#include <string>
#include <vector>

#include "inkjet/manifest.hpp"

namespace inkjet {

// Ink tint as RGB transmittance scaled to [0, 255]; droplets multiply the
// underlying paper color, so overlapping inks mix subtractively.
struct InkChannel {
  double density_per_mm2 = 100.0;  // clamped to the jittered-grid site density
  uint8_t tint_r = 60, tint_g = 200, tint_b = 235;
};

struct PrinterProfile {
  std::string name;
  std::vector<InkChannel> inks;
  double radius_mean_um = 30.0;  // droplet radius
  double radius_std_um = 4.0;
  double placement_jitter_um = 10.0;
  double row_pitch_um = 120.0;  // jittered grid pitch
  double satellite_prob = 0.1;
  uint64_t seed = 0;

  void validate() const;
};

// coverage(u, v) in [0,1] with u,v normalized page coordinates; scales the
// per-site keep probability so page content can be simulated
using CoverageMap = std::function<double(double, double)>;
CoverageMap uniform_coverage(double value = 1.0);

RgbImage render_document(const PrinterProfile& profile, int width, int height,
                         double dpi, const CoverageMap& coverage = uniform_coverage());

// Writes docs_per_profile PNGs per profile (alternating train/val starting
// with train) plus a manifest, mirroring the one-scan-per-split protocol.
Manifest make_synthetic_dataset(const std::vector<PrinterProfile>& profiles,
                                int docs_per_profile, const std::string& out_dir,
                                int canvas = 1024, double dpi = 2400.0);

// Well-separated parameter grid (pitch/radius/density/jitter vary per slot).
std::vector<PrinterProfile> make_profile_grid(int count, uint64_t seed);

// Identical parameters, distinct seeds; a chance-level control.
std::vector<PrinterProfile> make_identical_profiles(int count, uint64_t seed);

}  // namespace inkjet
