#include "inkjet/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "inkjet/imageio.hpp"
#include "inkjet/util.hpp"

namespace fs = std::filesystem;

namespace inkjet {

void PrinterProfile::validate() const {
  if (inks.empty()) throw std::invalid_argument("profile: needs at least one ink");
  for (const auto& ink : inks)
    if (ink.density_per_mm2 < 0.0)
      throw std::invalid_argument("profile: density must be >= 0");
  if (radius_mean_um <= 0.0 || radius_std_um < 0.0)
    throw std::invalid_argument("profile: invalid radius parameters");
  if (row_pitch_um <= 0.0) throw std::invalid_argument("profile: pitch must be > 0");
  if (satellite_prob < 0.0 || satellite_prob > 1.0)
    throw std::invalid_argument("profile: satellite_prob must be in [0, 1]");
}

CoverageMap uniform_coverage(double value) {
  return [value](double, double) { return value; };
}

namespace {

constexpr double kUmPerInch = 25400.0;

void stamp_disc(std::vector<double>& tr, std::vector<double>& tg,
                std::vector<double>& tb, int w, int h, double cx, double cy,
                double radius, const InkChannel& ink) {
  const double fr = ink.tint_r / 255.0, fg = ink.tint_g / 255.0, fb = ink.tint_b / 255.0;
  const double r2 = radius * radius;
  const int x0 = std::max(0, int(std::floor(cx - radius)));
  const int x1 = std::min(w - 1, int(std::ceil(cx + radius)));
  const int y0 = std::max(0, int(std::floor(cy - radius)));
  const int y1 = std::min(h - 1, int(std::ceil(cy + radius)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      if (dx * dx + dy * dy > r2) continue;
      size_t i = size_t(y) * w + x;
      tr[i] *= fr;
      tg[i] *= fg;
      tb[i] *= fb;
    }
}

}  // namespace

RgbImage render_document(const PrinterProfile& profile, int width, int height,
                         double dpi, const CoverageMap& coverage) {
  profile.validate();
  if (width < 1 || height < 1)
    throw std::invalid_argument("render_document: degenerate size");
  if (dpi <= 0.0) throw std::invalid_argument("render_document: dpi must be > 0");

  const double px_per_um = dpi / kUmPerInch;
  const double pitch_px = profile.row_pitch_um * px_per_um;
  const double jitter_px = profile.placement_jitter_um * px_per_um;
  const double sites_per_mm2 = 1e6 / (profile.row_pitch_um * profile.row_pitch_um);

  // transmittance planes, white paper = 1.0
  std::vector<double> tr(size_t(width) * height, 1.0), tg = tr, tb = tr;

  Rng rng(profile.seed);
  for (const InkChannel& ink : profile.inks) {
    const double keep = std::min(1.0, ink.density_per_mm2 / sites_per_mm2);
    if (keep <= 0.0) continue;
    const int nx = int(std::ceil(width / pitch_px));
    const int ny = int(std::ceil(height / pitch_px));
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        double cx = (i + 0.5) * pitch_px + rng.normal(0.0, jitter_px);
        double cy = (j + 0.5) * pitch_px + rng.normal(0.0, jitter_px);
        double u = std::clamp(cx / width, 0.0, 1.0);
        double v = std::clamp(cy / height, 0.0, 1.0);
        double accept = rng.uniform();
        double r_um = rng.normal(profile.radius_mean_um, profile.radius_std_um);
        bool satellite = rng.uniform() < profile.satellite_prob;
        double sat_angle = rng.uniform(0.0, 2.0 * M_PI);
        // all draws happen before the acceptance test so the stream stays
        // aligned across coverage maps
        if (accept >= keep * coverage(u, v)) continue;
        double radius_px = std::max(0.5, r_um * px_per_um);
        stamp_disc(tr, tg, tb, width, height, cx, cy, radius_px, ink);
        if (satellite) {
          double off = 2.2 * radius_px;
          stamp_disc(tr, tg, tb, width, height, cx + off * std::cos(sat_angle),
                     cy + off * std::sin(sat_angle), 0.4 * radius_px, ink);
        }
      }
  }

  RgbImage img;
  img.r = Plane(width, height, 255);
  img.g = Plane(width, height, 255);
  img.b = Plane(width, height, 255);
  for (size_t i = 0; i < tr.size(); ++i) {
    img.r.data[i] = uint16_t(std::lround(255.0 * tr[i]));
    img.g.data[i] = uint16_t(std::lround(255.0 * tg[i]));
    img.b.data[i] = uint16_t(std::lround(255.0 * tb[i]));
  }
  return img;
}

Manifest make_synthetic_dataset(const std::vector<PrinterProfile>& profiles,
                                int docs_per_profile, const std::string& out_dir,
                                int canvas, double dpi) {
  if (profiles.size() < 2)
    throw std::invalid_argument("make_synthetic_dataset: need at least 2 profiles");
  if (docs_per_profile < 2)
    throw std::invalid_argument("make_synthetic_dataset: need at least 2 docs per profile");
  fs::create_directories(out_dir);

  Manifest m;
  m.base_dir = out_dir;
  for (const PrinterProfile& p : profiles) {
    for (int d = 0; d < docs_per_profile; ++d) {
      std::string scan_id = p.name + "-scan" + std::to_string(d);
      std::string file = scan_id + ".png";
      PrinterProfile doc_profile = p;
      doc_profile.seed = p.seed ^ fnv1a64(scan_id);
      RgbImage img = render_document(doc_profile, canvas, canvas, dpi);
      write_png((fs::path(out_dir) / file).string(), img);
      ManifestEntry e;
      e.path = file;
      e.printer_model = p.name;
      e.manufacturer = "synth";
      e.scan_id = scan_id;
      e.split = d % 2 == 0 ? Split::Train : Split::Val;
      e.dpi = dpi;
      m.entries.push_back(std::move(e));
    }
  }
  save_manifest(m, (fs::path(out_dir) / "manifest.jsonl").string());
  return m;
}

std::vector<PrinterProfile> make_profile_grid(int count, uint64_t seed) {
  static const double kPitch[] = {90.0, 130.0, 180.0, 250.0};
  static const double kRadius[] = {18.0, 36.0};
  static const double kFill[] = {0.55, 0.8};
  std::vector<PrinterProfile> out;
  for (int i = 0; i < count; ++i) {
    PrinterProfile p;
    p.name = "synth-" + std::to_string(i);
    p.row_pitch_um = kPitch[i % 4];
    p.radius_mean_um = kRadius[(i / 4) % 2];
    p.radius_std_um = 0.15 * p.radius_mean_um;
    p.placement_jitter_um = 6.0 + 4.0 * double(i % 3);
    p.satellite_prob = 0.08 * double(i % 2);
    p.seed = seed + uint64_t(i) * 0x9e3779b9ull;
    double fill = kFill[(i / 8) % 2];
    double sites = 1e6 / (p.row_pitch_um * p.row_pitch_um);
    p.inks = {
        {fill * sites, 60, 200, 235},   // cyan-ish
        {fill * sites * 0.7, 230, 60, 190},  // magenta-ish
        {fill * sites * 0.5, 245, 235, 50},  // yellow-ish
    };
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PrinterProfile> make_identical_profiles(int count, uint64_t seed) {
  std::vector<PrinterProfile> out;
  for (int i = 0; i < count; ++i) {
    PrinterProfile p;
    p.name = "control-" + std::to_string(i);
    p.row_pitch_um = 140.0;
    p.radius_mean_um = 25.0;
    p.radius_std_um = 4.0;
    p.placement_jitter_um = 10.0;
    p.satellite_prob = 0.1;
    p.seed = seed + uint64_t(i) * 0x9e3779b9ull;  // the only difference
    double sites = 1e6 / (p.row_pitch_um * p.row_pitch_um);
    p.inks = {
        {0.7 * sites, 60, 200, 235},
        {0.5 * sites, 230, 60, 190},
        {0.35 * sites, 245, 235, 50},
    };
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace inkjet
