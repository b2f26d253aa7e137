#include "inkjet/config.hpp"

#include <fstream>
#include <stdexcept>

#include "inkjet/util.hpp"

using nlohmann::json;

namespace inkjet {

void PipelineConfig::validate() const {
  spectral.validate();
  preprocess.validate();
  train.validate();
  aggregation.validate();
  if (crops.count < 0) throw std::invalid_argument("config: crops.count must be >= 0");
  if (crops.min_droplets < 0)
    throw std::invalid_argument("config: crops.min_droplets must be >= 0");
  if (crops.retry_budget < 1)
    throw std::invalid_argument("config: crops.retry_budget must be >= 1");
  if (classifier != "mlp")
    throw std::invalid_argument("config: classifier '" + classifier +
                                "' is reserved but not implemented (only 'mlp')");
}

json PipelineConfig::to_json() const {
  return json{
      {"spectral",
       {{"method", to_string(spectral.method)},
        {"mode", to_string(spectral.mode)},
        {"wavelet_order", spectral.wavelet_order},
        {"dwt_levels", spectral.dwt_levels},
        {"boundary", spectral.boundary == BoundaryMode::Symmetric ? "symmetric" : "periodic"},
        {"stft_window", spectral.stft_window},
        {"stft_hop", spectral.stft_hop}}},
      {"preprocess",
       {{"sharpen_sigma", preprocess.sharpen_sigma},
        {"sharpen_amount", preprocess.sharpen_amount},
        {"denoise_window", preprocess.denoise_window},
        {"threshold_mode", preprocess.threshold_mode == ThresholdMode::Otsu ? "otsu" : "fixed"},
        {"fixed_threshold", preprocess.fixed_threshold}}},
      {"crops",
       {{"count", crops.count},
        {"seed", crops.seed},
        {"min_droplets", crops.min_droplets},
        {"retry_budget", crops.retry_budget}}},
      {"features", {{"subset", to_string(subset)}}},
      {"classifier", classifier},
      {"train",
       {{"learning_rate", train.learning_rate},
        {"l2_factor", train.l2_factor},
        {"batch_size", train.batch_size},
        {"max_epochs", train.max_epochs},
        {"patience", train.patience},
        {"seed", train.seed},
        {"hidden", train.hidden}}},
      {"aggregation",
       {{"point", to_string(aggregation.point)},
        {"train", aggregation.train_aggregated},
        {"val", aggregation.val_aggregated}}},
      {"synth",
       {{"profiles", synth.profiles},
        {"docs_per_profile", synth.docs_per_profile},
        {"canvas", synth.canvas},
        {"dpi", synth.dpi},
        {"identical_profiles", synth.identical_profiles},
        {"seed", synth.seed}}}};
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  if (j.contains("spectral")) {
    const auto& s = j["spectral"];
    if (s.contains("method"))
      c.spectral.method = spectral_method_from_string(s["method"].get<std::string>());
    if (s.contains("mode"))
      c.spectral.mode = spectral_mode_from_string(s["mode"].get<std::string>());
    if (s.contains("wavelet_order")) c.spectral.wavelet_order = s["wavelet_order"].get<int>();
    if (s.contains("dwt_levels")) c.spectral.dwt_levels = s["dwt_levels"].get<int>();
    if (s.contains("boundary")) {
      std::string b = s["boundary"].get<std::string>();
      if (b == "symmetric")
        c.spectral.boundary = BoundaryMode::Symmetric;
      else if (b == "periodic")
        c.spectral.boundary = BoundaryMode::Periodic;
      else
        throw std::invalid_argument("config: unknown boundary mode '" + b + "'");
    }
    if (s.contains("stft_window")) c.spectral.stft_window = s["stft_window"].get<int>();
    if (s.contains("stft_hop")) c.spectral.stft_hop = s["stft_hop"].get<int>();
  }
  if (j.contains("preprocess")) {
    const auto& p = j["preprocess"];
    if (p.contains("sharpen_sigma")) c.preprocess.sharpen_sigma = p["sharpen_sigma"].get<double>();
    if (p.contains("sharpen_amount"))
      c.preprocess.sharpen_amount = p["sharpen_amount"].get<double>();
    if (p.contains("denoise_window")) c.preprocess.denoise_window = p["denoise_window"].get<int>();
    if (p.contains("threshold_mode")) {
      std::string t = p["threshold_mode"].get<std::string>();
      if (t == "otsu")
        c.preprocess.threshold_mode = ThresholdMode::Otsu;
      else if (t == "fixed")
        c.preprocess.threshold_mode = ThresholdMode::Fixed;
      else
        throw std::invalid_argument("config: unknown threshold mode '" + t + "'");
    }
    if (p.contains("fixed_threshold"))
      c.preprocess.fixed_threshold = p["fixed_threshold"].get<uint16_t>();
  }
  if (j.contains("crops")) {
    const auto& p = j["crops"];
    if (p.contains("count")) c.crops.count = p["count"].get<int>();
    if (p.contains("seed")) c.crops.seed = p["seed"].get<uint64_t>();
    if (p.contains("min_droplets")) c.crops.min_droplets = p["min_droplets"].get<long>();
    if (p.contains("retry_budget")) c.crops.retry_budget = p["retry_budget"].get<int>();
  }
  if (j.contains("features") && j["features"].contains("subset"))
    c.subset = feature_subset_from_string(j["features"]["subset"].get<std::string>());
  if (j.contains("classifier")) c.classifier = j["classifier"].get<std::string>();
  if (j.contains("train")) {
    const auto& t = j["train"];
    if (t.contains("learning_rate")) c.train.learning_rate = t["learning_rate"].get<double>();
    if (t.contains("l2_factor")) c.train.l2_factor = t["l2_factor"].get<double>();
    if (t.contains("batch_size")) c.train.batch_size = t["batch_size"].get<int>();
    if (t.contains("max_epochs")) c.train.max_epochs = t["max_epochs"].get<int>();
    if (t.contains("patience")) c.train.patience = t["patience"].get<int>();
    if (t.contains("seed")) c.train.seed = t["seed"].get<uint64_t>();
    if (t.contains("hidden")) c.train.hidden = t["hidden"].get<std::vector<int>>();
  }
  if (j.contains("aggregation")) {
    const auto& a = j["aggregation"];
    if (a.contains("point"))
      c.aggregation.point = aggregation_point_from_string(a["point"].get<std::string>());
    if (a.contains("train")) c.aggregation.train_aggregated = a["train"].get<bool>();
    if (a.contains("val")) c.aggregation.val_aggregated = a["val"].get<bool>();
  }
  if (j.contains("synth")) {
    const auto& s = j["synth"];
    if (s.contains("profiles")) c.synth.profiles = s["profiles"].get<int>();
    if (s.contains("docs_per_profile"))
      c.synth.docs_per_profile = s["docs_per_profile"].get<int>();
    if (s.contains("canvas")) c.synth.canvas = s["canvas"].get<int>();
    if (s.contains("dpi")) c.synth.dpi = s["dpi"].get<double>();
    if (s.contains("identical_profiles"))
      c.synth.identical_profiles = s["identical_profiles"].get<bool>();
    if (s.contains("seed")) c.synth.seed = s["seed"].get<uint64_t>();
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config: " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

void PipelineConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("config: cannot write " + path);
  out << to_json().dump(2) << "\n";
}

uint64_t PipelineConfig::hash() const {
  std::string canonical = to_json().dump();
  return fnv1a64(canonical);
}

}  // namespace inkjet
