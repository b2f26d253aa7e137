#pragma once

#include <functional>
#include <string>
#include <vector>

#include "inkjet/config.hpp"
#include "inkjet/evaluate.hpp"
#include "inkjet/featurize.hpp"
#include "inkjet/manifest.hpp"
#include "inkjet/model.hpp"

namespace inkjet {

// Runs fn(0..n-1) on a worker pool; outputs must be written to per-index
// slots so results stay order-deterministic.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

// Samples crops.count crops per scan (seed derived from crops.seed and the
// scan_id) and extracts the full 241-feature vector for each.
FeatureTable extract_manifest_features(const Manifest& manifest,
                                       const PipelineConfig& config, int workers,
                                       bool progress = false);

// Feature table -> model-ready splits: label map from the train split,
// scaler fitted on training crops, subset applied, and the train side
// aggregated to per-document feature means when the config says so.
struct PreparedData {
  std::vector<std::string> labels;
  Scaler scaler;
  SampleSet train;
  SampleSet val;
};
PreparedData prepare_samples(const FeatureTable& table, const PipelineConfig& config);

// Trains one model on the table's train split (seed overrides config when
// >= 0 semantics are needed, pass config.train.seed).
TrainResult train_on_table(const FeatureTable& table, const PipelineConfig& config,
                           uint64_t seed);

// Per-seed train + evaluate; Top-1..5 F1 mean/std across seeds plus a summed
// confusion matrix at the configured aggregation granularity.
EvalReport evaluate_run(const FeatureTable& table, const PipelineConfig& config,
                        const std::vector<uint64_t>& seeds);

// Evaluates an already-trained model on the table's val split.
SeedScores evaluate_model(const MlpModel& model, const FeatureTable& table,
                          const AggregationConfig& agg,
                          std::vector<std::vector<long>>* confusion = nullptr);

struct RankedPrediction {
  std::string label;
  double mean_logit = 0.0;
};

// End-to-end single-scan path: sample, filter, extract, standardize, run the
// model and aggregate the crop logits.
std::vector<RankedPrediction> predict_scan(const MlpModel& model,
                                           const ScanDocument& doc,
                                           const PipelineConfig& config, int workers);

// Simple heatmap rendering of a confusion matrix (rows = true classes).
void render_confusion_png(const std::vector<std::vector<long>>& confusion,
                          const std::string& path);

}  // namespace inkjet
