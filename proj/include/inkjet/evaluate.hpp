#pragma once

#include <map>
#include <string>
#include <vector>

#include "inkjet/util.hpp"

namespace inkjet {

// The crop-aggregation regimes: where crops of one document are combined
// (feature averaging before the model, logit averaging after it, or not at
// all) and whether that happens during training and/or validation.
struct AggregationConfig {
  enum class Point { None, BeforePrediction, AfterPrediction };

  Point point = Point::AfterPrediction;
  bool train_aggregated = false;
  bool val_aggregated = true;

  // Only the five studied combinations are allowed.
  void validate() const;
  std::string describe() const;
};

AggregationConfig::Point aggregation_point_from_string(const std::string& s);
std::string to_string(AggregationConfig::Point p);

// element-wise mean of per-crop logit vectors
std::vector<double> aggregate_logits(const std::vector<std::vector<double>>& crop_logits);

// element-wise mean of per-crop feature vectors
std::vector<double> aggregate_features(const std::vector<std::vector<double>>& crop_vectors);

// Ranks a sample's classes by logit (ties broken by class index). A sample
// is a hit when the true class ranks within the top n; hits are scored as a
// prediction of the true class, misses as the top-1 class, which reduces to
// standard F1 at n = 1.
std::vector<int> top_n_scored_predictions(const std::vector<std::vector<double>>& logits,
                                          const std::vector<int>& labels, int n);

double macro_f1(const std::vector<int>& predictions, const std::vector<int>& labels,
                int num_classes);

double top_n_f1(const std::vector<std::vector<double>>& logits,
                const std::vector<int>& labels, int n, int num_classes);

// rows = true class, columns = predicted class
std::vector<std::vector<long>> confusion_matrix(const std::vector<int>& predictions,
                                                const std::vector<int>& labels,
                                                int num_classes);

inline constexpr int kMaxTopN = 5;

struct SeedScores {
  uint64_t seed = 0;
  std::array<double, kMaxTopN> f1_top_n{};  // index 0 -> Top-1
};

struct EvalReport {
  std::string granularity;  // "per_crop" or "per_document"
  std::vector<std::string> labels;
  std::vector<SeedScores> per_seed;
  std::array<double, kMaxTopN> f1_mean{};
  std::array<double, kMaxTopN> f1_std{};
  std::vector<std::vector<long>> confusion;  // summed over seeds

  void finalize();  // fills mean/std from per_seed
};

}  // namespace inkjet
