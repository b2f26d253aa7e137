#include "inkjet/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace inkjet {

void AggregationConfig::validate() const {
  const bool ok =
      (point == Point::None && !train_aggregated && !val_aggregated) ||
      (point == Point::AfterPrediction && !train_aggregated && val_aggregated) ||
      (point == Point::AfterPrediction && train_aggregated && val_aggregated) ||
      (point == Point::BeforePrediction && train_aggregated && val_aggregated) ||
      (point == Point::BeforePrediction && train_aggregated && !val_aggregated);
  if (!ok)
    throw std::invalid_argument("aggregation: invalid combination " + describe());
}

std::string AggregationConfig::describe() const {
  return "(point=" + to_string(point) +
         ", train=" + (train_aggregated ? "yes" : "no") +
         ", val=" + (val_aggregated ? "yes" : "no") + ")";
}

AggregationConfig::Point aggregation_point_from_string(const std::string& s) {
  if (s == "none") return AggregationConfig::Point::None;
  if (s == "before_prediction") return AggregationConfig::Point::BeforePrediction;
  if (s == "after_prediction") return AggregationConfig::Point::AfterPrediction;
  throw std::invalid_argument("unknown aggregation point: " + s);
}

std::string to_string(AggregationConfig::Point p) {
  switch (p) {
    case AggregationConfig::Point::None: return "none";
    case AggregationConfig::Point::BeforePrediction: return "before_prediction";
    default: return "after_prediction";
  }
}

namespace {

std::vector<double> elementwise_mean(const std::vector<std::vector<double>>& vs,
                                     const char* what) {
  if (vs.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  const size_t dim = vs.front().size();
  std::vector<double> out(dim, 0.0);
  for (const auto& v : vs) {
    if (v.size() != dim)
      throw std::invalid_argument(std::string(what) + ": length mismatch");
    for (size_t i = 0; i < dim; ++i) out[i] += v[i];
  }
  for (double& x : out) x /= double(vs.size());
  return out;
}

}  // namespace

std::vector<double> aggregate_logits(const std::vector<std::vector<double>>& crop_logits) {
  return elementwise_mean(crop_logits, "aggregate_logits");
}

std::vector<double> aggregate_features(const std::vector<std::vector<double>>& crop_vectors) {
  return elementwise_mean(crop_vectors, "aggregate_features");
}

std::vector<int> top_n_scored_predictions(const std::vector<std::vector<double>>& logits,
                                          const std::vector<int>& labels, int n) {
  if (logits.size() != labels.size())
    throw std::invalid_argument("top_n: logits/labels length mismatch");
  if (n < 1) throw std::invalid_argument("top_n: n must be >= 1");
  std::vector<int> preds(labels.size());
  std::vector<int> order;
  for (size_t s = 0; s < logits.size(); ++s) {
    const auto& l = logits[s];
    if (n > int(l.size())) throw std::invalid_argument("top_n: n exceeds class count");
    order.resize(l.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return l[size_t(a)] > l[size_t(b)]; });
    bool hit = false;
    for (int r = 0; r < n; ++r)
      if (order[size_t(r)] == labels[s]) {
        hit = true;
        break;
      }
    preds[s] = hit ? labels[s] : order[0];
  }
  return preds;
}

double macro_f1(const std::vector<int>& predictions, const std::vector<int>& labels,
                int num_classes) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("macro_f1: length mismatch");
  std::vector<long> tp(size_t(num_classes), 0), fp(size_t(num_classes), 0),
      fn(size_t(num_classes), 0);
  for (size_t i = 0; i < labels.size(); ++i) {
    int t = labels[i], p = predictions[i];
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes)
      throw std::out_of_range("macro_f1: label outside class range");
    if (t == p)
      ++tp[size_t(t)];
    else {
      ++fp[size_t(p)];
      ++fn[size_t(t)];
    }
  }
  double sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    long denom = 2 * tp[size_t(c)] + fp[size_t(c)] + fn[size_t(c)];
    sum += denom > 0 ? 2.0 * double(tp[size_t(c)]) / double(denom) : 0.0;
  }
  return sum / double(num_classes);
}

double top_n_f1(const std::vector<std::vector<double>>& logits,
                const std::vector<int>& labels, int n, int num_classes) {
  return macro_f1(top_n_scored_predictions(logits, labels, n), labels, num_classes);
}

std::vector<std::vector<long>> confusion_matrix(const std::vector<int>& predictions,
                                                const std::vector<int>& labels,
                                                int num_classes) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("confusion_matrix: length mismatch");
  std::vector<std::vector<long>> m(size_t(num_classes),
                                   std::vector<long>(size_t(num_classes), 0));
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes || predictions[i] < 0 ||
        predictions[i] >= num_classes)
      throw std::out_of_range("confusion_matrix: label outside class range");
    ++m[size_t(labels[i])][size_t(predictions[i])];
  }
  return m;
}

void EvalReport::finalize() {
  const double n = double(per_seed.size());
  for (int k = 0; k < kMaxTopN; ++k) {
    double mean = 0.0;
    for (const auto& s : per_seed) mean += s.f1_top_n[size_t(k)];
    mean = n > 0 ? mean / n : 0.0;
    double var = 0.0;
    for (const auto& s : per_seed) {
      double d = s.f1_top_n[size_t(k)] - mean;
      var += d * d;
    }
    f1_mean[size_t(k)] = mean;
    f1_std[size_t(k)] = n > 0 ? std::sqrt(var / n) : 0.0;
  }
}

}  // namespace inkjet
