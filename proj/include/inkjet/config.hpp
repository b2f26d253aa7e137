#pragma once

#include <string>

#include <json.hpp>

#include "inkjet/evaluate.hpp"
#include "inkjet/featurize.hpp"
#include "inkjet/model.hpp"
#include "inkjet/preprocess.hpp"
#include "inkjet/spectral.hpp"

namespace inkjet {

struct CropParams {
  int count = 96;
  uint64_t seed = 0;
  long min_droplets = 10;
  int retry_budget = 20;
};

struct SynthParams {
  int profiles = 8;
  int docs_per_profile = 2;
  int canvas = 1024;
  double dpi = 2400.0;
  bool identical_profiles = false;
  uint64_t seed = 0;
};

// Everything a pipeline run needs; serialized as a single JSON document so
// runs are reproducible from (config, seed) alone.
struct PipelineConfig {
  SpectralParams spectral;
  PreprocessParams preprocess;
  CropParams crops;
  FeatureSubset subset = FeatureSubset::All;
  std::string classifier = "mlp";
  TrainConfig train;
  AggregationConfig aggregation;
  SynthParams synth;

  void validate() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::string& path);
  void save(const std::string& path) const;

  // FNV-1a of the canonical JSON dump; embedded in every output
  uint64_t hash() const;
};

}  // namespace inkjet
