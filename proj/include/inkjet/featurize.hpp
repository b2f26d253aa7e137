#pragma once

#include <string>
#include <vector>

#include "inkjet/droplet.hpp"
#include "inkjet/image.hpp"
#include "inkjet/manifest.hpp"
#include "inkjet/preprocess.hpp"
#include "inkjet/spectral.hpp"

namespace inkjet {

inline constexpr const char* kLayoutVersion = "ijf-241-v1";

// 3 contrast + 3 color channels * (2 pixel stats) + 4 channels * (10 droplet
// stats + 4 bands * 12 band stats). Gray pixel mean/std are omitted: they are
// redundant with the intensity features, and this is the only allocation
// matching the 241 total.
inline constexpr int kNumFeatures = 241;
static_assert(3 + 3 * 2 + kNumChannels * (kDropletStatCount + kNumBands * kBandStatCount) ==
              kNumFeatures);

enum class FeatureSubset { All, SingleChannel, FrequencyOnly };
std::string to_string(FeatureSubset s);
FeatureSubset feature_subset_from_string(const std::string& s);

struct FeatureParams {
  SpectralParams spectral;
  PreprocessParams preprocess;
};

// Fixed feature ordering; names look like "gray.band2.entropy".
const std::vector<std::string>& feature_names();

// Indices kept by a subset mode (All -> 241, SingleChannel -> 61,
// FrequencyOnly -> 192), in layout order.
const std::vector<int>& subset_indices(FeatureSubset mode);

std::vector<double> feature_subset(const std::vector<double>& v, FeatureSubset mode);

// The 241-dimensional descriptor of one crop.
std::vector<double> extract_features(const Crop& crop, const FeatureParams& params);

// Per-dimension standardization statistics from training crops only.
struct Scaler {
  std::vector<double> means;
  std::vector<double> stds;  // population std; 0 marks a constant feature
  long fitted_on = 0;

  std::vector<int> constant_dims() const;
};

Scaler fit_scaler(const std::vector<std::vector<double>>& train_vectors);

// (v - mean) / std per dimension; constant features map to 0.
std::vector<double> apply_scaler(const std::vector<double>& v, const Scaler& s);

// --- Feature file ------------------------------------------------------

struct FeatureRow {
  std::string scan_id;
  std::string label;
  Split split = Split::Train;
  int x = 0;
  int y = 0;
  std::vector<double> values;
};

struct FeatureTable {
  std::string layout_version = kLayoutVersion;
  uint64_t config_hash = 0;
  std::vector<std::string> names;
  std::vector<FeatureRow> rows;

  std::vector<const FeatureRow*> split_rows(Split s) const;
};

// ".jsonl" -> text encoding (header line + one object per row), anything
// else -> binary container (magic IJFV, JSON header, little-endian f64 rows).
void save_feature_table(const FeatureTable& t, const std::string& path);
FeatureTable load_feature_table(const std::string& path);

}  // namespace inkjet
