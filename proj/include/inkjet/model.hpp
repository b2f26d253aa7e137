#pragma once

#include <string>
#include <vector>

#include "inkjet/evaluate.hpp"
#include "inkjet/featurize.hpp"
#include "inkjet/util.hpp"

namespace inkjet {

// MLP with tanh hidden layers and a linear output layer. 64-bit weights
// throughout so gradients can be checked against finite differences.
struct MlpModel {
  std::vector<int> dims;                    // [input, hidden..., classes]
  std::vector<Mat> weights;                 // layer l: [dims[l+1] x dims[l]]
  std::vector<std::vector<double>> biases;  // layer l: dims[l+1]
  std::vector<std::string> labels;          // class index -> printer model
  Scaler scaler;
  FeatureSubset subset = FeatureSubset::All;
  std::string layout_version = kLayoutVersion;
  uint64_t config_hash = 0;

  int input_dim() const { return dims.front(); }
  int num_classes() const { return dims.back(); }
  int num_layers() const { return int(weights.size()); }

  // logits; no softmax applied
  std::vector<double> forward(std::span<const double> v) const;
  Mat forward_batch(const Mat& x) const;

  // standardize (and subset) a raw 241-feature vector into model input space
  std::vector<double> prepare_input(const std::vector<double>& full_features) const;
};

// Glorot-uniform initialization, seeded.
MlpModel init_mlp(int input_dim, const std::vector<int>& hidden, int num_classes,
                  uint64_t seed);

struct Gradients {
  std::vector<Mat> dw;
  std::vector<std::vector<double>> db;
};

// Mean cross-entropy over the batch plus l2 * sum(weights^2) (biases are not
// regularized). Rows of `x` are inputs, `y` holds class indices.
double loss_and_grad(const MlpModel& model, const Mat& x, const std::vector<int>& y,
                     double l2, Gradients& grads);

// Same loss where rows are grouped into documents and the cross-entropy is
// taken on the per-document mean logit (one label per group). `group`
// assigns each row to a document index.
double loss_and_grad_grouped(const MlpModel& model, const Mat& x,
                             const std::vector<int>& group, int num_groups,
                             const std::vector<int>& group_labels, double l2,
                             Gradients& grads);

std::vector<double> softmax(std::span<const double> logits);

// Adam with bias correction (beta1 0.9, beta2 0.999, eps 1e-8).
class AdamOptimizer {
 public:
  AdamOptimizer(const MlpModel& model, double learning_rate);
  void step(MlpModel& model, const Gradients& grads);

 private:
  double lr_;
  long t_ = 0;
  std::vector<Mat> mw_, vw_;
  std::vector<std::vector<double>> mb_, vb_;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  double l2_factor = 1e-4;
  int batch_size = 64;
  int max_epochs = 500;
  int patience = 20;
  uint64_t seed = 0;
  std::vector<int> hidden = {512, 512, 512};

  void validate() const;
};

// Model-ready rows: standardized features, class indices, source documents.
struct SampleSet {
  Mat x;
  std::vector<int> y;
  std::vector<std::string> doc;

  int count() const { return x.rows; }
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_f1 = 0.0;
};

struct TrainResult {
  MlpModel model;  // best-validation checkpoint
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_f1 = 0.0;
};

// Adam with early stopping on validation Top-1 F1 computed under the
// configured aggregation. Deterministic per seed. `base` provides labels,
// scaler and metadata; its weights are re-initialized from config.seed.
TrainResult train(const MlpModel& base, const SampleSet& train_set,
                  const SampleSet& val_set, const TrainConfig& config,
                  const AggregationConfig& agg);

// Validation Top-1 F1 for a sample set under the aggregation config
// (per-document logit means, per-document feature means, or per-crop).
double validation_top1_f1(const MlpModel& model, const SampleSet& val_set,
                          const AggregationConfig& agg);

// --- Checkpoint container -----------------------------------------------

void save_checkpoint(const MlpModel& model, const std::string& path);
MlpModel load_checkpoint(const std::string& path);

}  // namespace inkjet
