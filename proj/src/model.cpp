#include "inkjet/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

using nlohmann::json;

namespace inkjet {

namespace {

// C[n x m] = A[n x k] * B[m x k]^T. Every output element is accumulated by a
// single thread, so results do not depend on the thread count.
Mat matmul_nt(const Mat& a, const Mat& b) {
  Mat c(a.rows, b.rows);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* bj = b.row(j);
      double s = 0.0;
      for (int k = 0; k < a.cols; ++k) s += ai[k] * bj[k];
      ci[j] = s;
    }
  }
  return c;
}

// C[m x k] = A[n x m]^T * B[n x k]
Mat matmul_tn(const Mat& a, const Mat& b) {
  Mat c(a.cols, b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.cols; ++i) {
    double* ci = c.row(i);
    for (int t = 0; t < a.rows; ++t) {
      const double av = a.at(t, i);
      if (av == 0.0) continue;
      const double* bt = b.row(t);
      for (int k = 0; k < b.cols; ++k) ci[k] += av * bt[k];
    }
  }
  return c;
}

// C[n x k] = A[n x m] * B[m x k]
Mat matmul_nn(const Mat& a, const Mat& b) {
  Mat c(a.rows, b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int t = 0; t < a.cols; ++t) {
      const double av = ai[t];
      if (av == 0.0) continue;
      const double* bt = b.row(t);
      for (int k = 0; k < b.cols; ++k) ci[k] += av * bt[k];
    }
  }
  return c;
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

MlpModel init_mlp(int input_dim, const std::vector<int>& hidden, int num_classes,
                  uint64_t seed) {
  if (input_dim < 1 || num_classes < 2)
    throw std::invalid_argument("init_mlp: need input_dim >= 1 and >= 2 classes");
  MlpModel m;
  m.dims.push_back(input_dim);
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("init_mlp: hidden sizes must be >= 1");
    m.dims.push_back(h);
  }
  m.dims.push_back(num_classes);
  Rng rng(seed);
  for (size_t l = 0; l + 1 < m.dims.size(); ++l) {
    int fan_in = m.dims[l], fan_out = m.dims[l + 1];
    double bound = std::sqrt(6.0 / double(fan_in + fan_out));
    Mat w(fan_out, fan_in);
    for (double& x : w.v) x = rng.uniform(-bound, bound);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(size_t(fan_out), 0.0);
  }
  return m;
}

namespace {

struct ForwardCache {
  std::vector<Mat> acts;  // acts[0] = input, acts.back() = logits
};

ForwardCache forward_cached(const MlpModel& m, const Mat& x) {
  ForwardCache cache;
  cache.acts.push_back(x);
  for (int l = 0; l < m.num_layers(); ++l) {
    Mat z = matmul_nt(cache.acts.back(), m.weights[size_t(l)]);
    const auto& b = m.biases[size_t(l)];
    const bool last = l == m.num_layers() - 1;
#pragma omp parallel for schedule(static)
    for (int r = 0; r < z.rows; ++r) {
      double* zr = z.row(r);
      for (int c = 0; c < z.cols; ++c) {
        zr[c] += b[size_t(c)];
        if (!last) zr[c] = std::tanh(zr[c]);
      }
    }
    cache.acts.push_back(std::move(z));
  }
  return cache;
}

// backprop from dlogits (already scaled); adds l2 gradients
void backward(const MlpModel& m, const ForwardCache& cache, Mat dz, double l2,
              Gradients& grads) {
  grads.dw.resize(size_t(m.num_layers()));
  grads.db.resize(size_t(m.num_layers()));
  for (int l = m.num_layers() - 1; l >= 0; --l) {
    grads.dw[size_t(l)] = matmul_tn(dz, cache.acts[size_t(l)]);
    if (l2 != 0.0) {
      const Mat& w = m.weights[size_t(l)];
      for (size_t i = 0; i < w.v.size(); ++i) grads.dw[size_t(l)].v[i] += 2.0 * l2 * w.v[i];
    }
    auto& db = grads.db[size_t(l)];
    db.assign(size_t(dz.cols), 0.0);
    for (int r = 0; r < dz.rows; ++r)
      for (int c = 0; c < dz.cols; ++c) db[size_t(c)] += dz.at(r, c);
    if (l > 0) {
      Mat da = matmul_nn(dz, m.weights[size_t(l)]);
      const Mat& act = cache.acts[size_t(l)];
#pragma omp parallel for schedule(static)
      for (int r = 0; r < da.rows; ++r)
        for (int c = 0; c < da.cols; ++c) {
          double a = act.at(r, c);
          da.at(r, c) *= 1.0 - a * a;
        }
      dz = std::move(da);
    }
  }
}

double l2_penalty(const MlpModel& m, double l2) {
  if (l2 == 0.0) return 0.0;
  double s = 0.0;
  for (const Mat& w : m.weights)
    for (double x : w.v) s += x * x;
  return l2 * s;
}

}  // namespace

std::vector<double> MlpModel::forward(std::span<const double> v) const {
  if (int(v.size()) != input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");
  Mat x(1, input_dim());
  std::copy(v.begin(), v.end(), x.v.begin());
  Mat logits = forward_batch(x);
  return {logits.v.begin(), logits.v.end()};
}

Mat MlpModel::forward_batch(const Mat& x) const {
  if (x.cols != input_dim())
    throw std::invalid_argument("forward_batch: input dimension mismatch");
  return forward_cached(*this, x).acts.back();
}

std::vector<double> MlpModel::prepare_input(const std::vector<double>& full) const {
  return apply_scaler(feature_subset(full, subset), scaler);
}

double loss_and_grad(const MlpModel& model, const Mat& x, const std::vector<int>& y,
                     double l2, Gradients& grads) {
  if (x.rows == 0) throw std::invalid_argument("loss_and_grad: empty batch");
  if (int(y.size()) != x.rows)
    throw std::invalid_argument("loss_and_grad: batch size mismatch");
  const int k = model.num_classes();
  for (int label : y)
    if (label < 0 || label >= k)
      throw std::out_of_range("loss_and_grad: label index out of range");

  ForwardCache cache = forward_cached(model, x);
  const Mat& logits = cache.acts.back();
  const double inv_n = 1.0 / double(x.rows);
  Mat dz(x.rows, k);
  double loss = 0.0;
  for (int r = 0; r < x.rows; ++r) {
    auto p = softmax(std::span<const double>(logits.row(r), size_t(k)));
    loss -= std::log(std::max(p[size_t(y[size_t(r)])], 1e-300));
    for (int c = 0; c < k; ++c)
      dz.at(r, c) = (p[size_t(c)] - (c == y[size_t(r)] ? 1.0 : 0.0)) * inv_n;
  }
  loss *= inv_n;
  loss += l2_penalty(model, l2);
  backward(model, cache, std::move(dz), l2, grads);
  return loss;
}

double loss_and_grad_grouped(const MlpModel& model, const Mat& x,
                             const std::vector<int>& group, int num_groups,
                             const std::vector<int>& group_labels, double l2,
                             Gradients& grads) {
  if (x.rows == 0 || num_groups == 0)
    throw std::invalid_argument("loss_and_grad_grouped: empty batch");
  if (int(group.size()) != x.rows || int(group_labels.size()) != num_groups)
    throw std::invalid_argument("loss_and_grad_grouped: group bookkeeping mismatch");
  const int k = model.num_classes();

  ForwardCache cache = forward_cached(model, x);
  const Mat& logits = cache.acts.back();

  Mat mean_logits(num_groups, k);
  std::vector<double> count(size_t(num_groups), 0.0);
  for (int r = 0; r < x.rows; ++r) {
    int g = group[size_t(r)];
    count[size_t(g)] += 1.0;
    for (int c = 0; c < k; ++c) mean_logits.at(g, c) += logits.at(r, c);
  }
  for (int g = 0; g < num_groups; ++g) {
    if (count[size_t(g)] == 0.0)
      throw std::invalid_argument("loss_and_grad_grouped: empty group");
    for (int c = 0; c < k; ++c) mean_logits.at(g, c) /= count[size_t(g)];
  }

  double loss = 0.0;
  const double inv_g = 1.0 / double(num_groups);
  Mat dmean(num_groups, k);
  for (int g = 0; g < num_groups; ++g) {
    int label = group_labels[size_t(g)];
    if (label < 0 || label >= k)
      throw std::out_of_range("loss_and_grad_grouped: label index out of range");
    auto p = softmax(std::span<const double>(mean_logits.row(g), size_t(k)));
    loss -= std::log(std::max(p[size_t(label)], 1e-300));
    for (int c = 0; c < k; ++c)
      dmean.at(g, c) = (p[size_t(c)] - (c == label ? 1.0 : 0.0)) * inv_g;
  }
  loss *= inv_g;
  loss += l2_penalty(model, l2);

  Mat dz(x.rows, k);
  for (int r = 0; r < x.rows; ++r) {
    int g = group[size_t(r)];
    for (int c = 0; c < k; ++c) dz.at(r, c) = dmean.at(g, c) / count[size_t(g)];
  }
  backward(model, cache, std::move(dz), l2, grads);
  return loss;
}

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw std::invalid_argument("train: learning_rate must be > 0");
  if (l2_factor < 0.0) throw std::invalid_argument("train: l2_factor must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
  if (patience < 1) throw std::invalid_argument("train: patience must be >= 1");
  if (hidden.empty()) throw std::invalid_argument("train: need at least one hidden layer");
}

namespace {
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
}  // namespace

AdamOptimizer::AdamOptimizer(const MlpModel& model, double learning_rate)
    : lr_(learning_rate) {
  for (const Mat& w : model.weights) {
    mw_.emplace_back(w.rows, w.cols);
    vw_.emplace_back(w.rows, w.cols);
  }
  for (const auto& b : model.biases) {
    mb_.emplace_back(b.size(), 0.0);
    vb_.emplace_back(b.size(), 0.0);
  }
}

void AdamOptimizer::step(MlpModel& model, const Gradients& g) {
  ++t_;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, double(t_));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, double(t_));
  for (size_t l = 0; l < model.weights.size(); ++l) {
    auto& w = model.weights[l].v;
    const auto& gw = g.dw[l].v;
    auto& m = mw_[l].v;
    auto& v = vw_[l].v;
    for (size_t i = 0; i < w.size(); ++i) {
      m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * gw[i];
      v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * gw[i] * gw[i];
      w[i] -= lr_ * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kAdamEps);
    }
    auto& b = model.biases[l];
    const auto& gb = g.db[l];
    auto& m2 = mb_[l];
    auto& v2 = vb_[l];
    for (size_t i = 0; i < b.size(); ++i) {
      m2[i] = kAdamBeta1 * m2[i] + (1.0 - kAdamBeta1) * gb[i];
      v2[i] = kAdamBeta2 * v2[i] + (1.0 - kAdamBeta2) * gb[i] * gb[i];
      b[i] -= lr_ * (m2[i] / bc1) / (std::sqrt(v2[i] / bc2) + kAdamEps);
    }
  }
}

namespace {

void shuffle_indices(std::vector<int>& idx, Rng& rng) {
  for (size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[size_t(rng.uniform_int(0, int64_t(i) - 1))]);
}

Mat gather_rows(const Mat& x, const std::vector<int>& idx, int from, int to) {
  Mat out(to - from, x.cols);
  for (int i = from; i < to; ++i)
    std::memcpy(out.row(i - from), x.row(idx[size_t(i)]), size_t(x.cols) * sizeof(double));
  return out;
}

}  // namespace

double validation_top1_f1(const MlpModel& model, const SampleSet& val_set,
                          const AggregationConfig& agg) {
  const int k = model.num_classes();
  Mat logits = model.forward_batch(val_set.x);
  if (!agg.val_aggregated) {
    std::vector<std::vector<double>> rows((size_t(logits.rows)));
    for (int r = 0; r < logits.rows; ++r)
      rows[size_t(r)].assign(logits.row(r), logits.row(r) + k);
    return top_n_f1(rows, val_set.y, 1, k);
  }
  // group rows by document, in first-appearance order
  std::map<std::string, int> doc_index;
  std::vector<int> doc_of_row((size_t(logits.rows)));
  std::vector<int> doc_labels;
  for (int r = 0; r < logits.rows; ++r) {
    auto [it, inserted] = doc_index.try_emplace(val_set.doc[size_t(r)],
                                                int(doc_index.size()));
    doc_of_row[size_t(r)] = it->second;
    if (inserted) doc_labels.push_back(val_set.y[size_t(r)]);
  }
  const int num_docs = int(doc_index.size());
  if (agg.point == AggregationConfig::Point::BeforePrediction) {
    Mat doc_x(num_docs, val_set.x.cols);
    std::vector<double> count(size_t(num_docs), 0.0);
    for (int r = 0; r < val_set.x.rows; ++r) {
      int g = doc_of_row[size_t(r)];
      count[size_t(g)] += 1.0;
      for (int c = 0; c < val_set.x.cols; ++c) doc_x.at(g, c) += val_set.x.at(r, c);
    }
    for (int g = 0; g < num_docs; ++g)
      for (int c = 0; c < val_set.x.cols; ++c) doc_x.at(g, c) /= count[size_t(g)];
    Mat doc_logits = model.forward_batch(doc_x);
    std::vector<std::vector<double>> rows((size_t(num_docs)));
    for (int g = 0; g < num_docs; ++g)
      rows[size_t(g)].assign(doc_logits.row(g), doc_logits.row(g) + k);
    return top_n_f1(rows, doc_labels, 1, k);
  }
  std::vector<std::vector<double>> mean(size_t(num_docs), std::vector<double>(size_t(k), 0.0));
  std::vector<double> count(size_t(num_docs), 0.0);
  for (int r = 0; r < logits.rows; ++r) {
    int g = doc_of_row[size_t(r)];
    count[size_t(g)] += 1.0;
    for (int c = 0; c < k; ++c) mean[size_t(g)][size_t(c)] += logits.at(r, c);
  }
  for (int g = 0; g < num_docs; ++g)
    for (int c = 0; c < k; ++c) mean[size_t(g)][size_t(c)] /= count[size_t(g)];
  return top_n_f1(mean, doc_labels, 1, k);
}

TrainResult train(const MlpModel& base, const SampleSet& train_set,
                  const SampleSet& val_set, const TrainConfig& config,
                  const AggregationConfig& agg) {
  config.validate();
  agg.validate();
  if (train_set.count() == 0 || val_set.count() == 0)
    throw std::invalid_argument("train: empty train or val set");
  const int k = base.num_classes();
  for (int y : train_set.y)
    if (y < 0 || y >= k) throw std::out_of_range("train: train label out of range");
  for (int y : val_set.y)
    if (y < 0 || y >= k) throw std::out_of_range("train: val label out of range");

  MlpModel model = init_mlp(train_set.x.cols, config.hidden, k, config.seed);
  model.labels = base.labels;
  model.scaler = base.scaler;
  model.subset = base.subset;
  model.layout_version = base.layout_version;
  model.config_hash = base.config_hash;

  const bool grouped_loss =
      agg.point == AggregationConfig::Point::AfterPrediction && agg.train_aggregated;

  // training units: rows, or whole documents when the loss is computed on
  // per-document mean logits
  std::vector<std::vector<int>> doc_rows;
  std::vector<int> doc_labels;
  if (grouped_loss) {
    std::map<std::string, int> doc_index;
    for (int r = 0; r < train_set.count(); ++r) {
      auto [it, inserted] =
          doc_index.try_emplace(train_set.doc[size_t(r)], int(doc_index.size()));
      if (inserted) {
        doc_rows.emplace_back();
        doc_labels.push_back(train_set.y[size_t(r)]);
      }
      doc_rows[size_t(it->second)].push_back(r);
    }
  }

  AdamOptimizer adam(model, config.learning_rate);
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ull);
  Gradients grads;

  TrainResult result;
  MlpModel best = model;
  double best_f1 = -1.0;
  int best_epoch = 0, since_best = 0;

  const int num_units = grouped_loss ? int(doc_rows.size()) : train_set.count();
  std::vector<int> order((size_t(num_units)));
  for (int i = 0; i < num_units; ++i) order[size_t(i)] = i;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_indices(order, rng);
    double epoch_loss = 0.0;
    int batches = 0;
    for (int start = 0; start < num_units; start += config.batch_size) {
      const int end = std::min(start + config.batch_size, num_units);
      double loss;
      if (grouped_loss) {
        int total_rows = 0;
        for (int u = start; u < end; ++u)
          total_rows += int(doc_rows[size_t(order[size_t(u)])].size());
        Mat x(total_rows, train_set.x.cols);
        std::vector<int> group((size_t(total_rows)));
        std::vector<int> labels((size_t(end - start)));
        int r = 0;
        for (int u = start; u < end; ++u) {
          int d = order[size_t(u)];
          labels[size_t(u - start)] = doc_labels[size_t(d)];
          for (int src : doc_rows[size_t(d)]) {
            std::memcpy(x.row(r), train_set.x.row(src), size_t(x.cols) * sizeof(double));
            group[size_t(r)] = u - start;
            ++r;
          }
        }
        loss = loss_and_grad_grouped(model, x, group, end - start, labels,
                                     config.l2_factor, grads);
      } else {
        Mat x = gather_rows(train_set.x, order, start, end);
        std::vector<int> y((size_t(end - start)));
        for (int i = start; i < end; ++i) y[size_t(i - start)] = train_set.y[size_t(order[size_t(i)])];
        loss = loss_and_grad(model, x, y, config.l2_factor, grads);
      }
      adam.step(model, grads);
      epoch_loss += loss;
      ++batches;
    }
    epoch_loss /= double(std::max(batches, 1));

    double val_f1 = validation_top1_f1(model, val_set, agg);
    result.log.push_back({epoch, epoch_loss, val_f1});

    if (val_f1 > best_f1) {
      best_f1 = val_f1;
      best = model;
      best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
      if (since_best >= config.patience) break;
    }
  }

  result.model = std::move(best);
  result.best_epoch = best_epoch;
  result.best_val_f1 = best_f1;
  return result;
}

// --- Checkpoint ----------------------------------------------------------

namespace {
constexpr char kCkptMagic[4] = {'I', 'J', 'C', 'K'};
constexpr uint32_t kCkptVersion = 1;
}  // namespace

void save_checkpoint(const MlpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);

  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)model.config_hash);
  json header{{"layout_version", model.layout_version},
              {"config_hash", hex},
              {"labels", model.labels},
              {"subset", to_string(model.subset)},
              {"dims", model.dims},
              {"scaler",
               {{"means", model.scaler.means},
                {"stds", model.scaler.stds},
                {"fitted_on", model.scaler.fitted_on}}}};
  std::string h = header.dump();

  std::vector<char> payload;
  auto append = [&](const double* p, size_t n) {
    const char* c = reinterpret_cast<const char*>(p);
    payload.insert(payload.end(), c, c + n * sizeof(double));
  };
  for (size_t l = 0; l < model.weights.size(); ++l) {
    append(model.weights[l].v.data(), model.weights[l].v.size());
    append(model.biases[l].data(), model.biases[l].size());
  }
  uint64_t digest = fnv1a64(payload.data(), payload.size());

  out.write(kCkptMagic, 4);
  uint32_t version = kCkptVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  uint64_t hlen = h.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof hlen);
  out.write(h.data(), long(h.size()));
  uint64_t plen = payload.size();
  out.write(reinterpret_cast<const char*>(&plen), sizeof plen);
  out.write(payload.data(), long(payload.size()));
  out.write(reinterpret_cast<const char*>(&digest), sizeof digest);
  if (!out) throw std::runtime_error("checkpoint: write failed: " + path);
}

MlpModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCkptMagic, 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (version != kCkptVersion)
    throw std::runtime_error("checkpoint: unsupported version in " + path);
  uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof hlen);
  std::string h(hlen, '\0');
  in.read(h.data(), long(hlen));
  json header = json::parse(h);

  MlpModel m;
  m.layout_version = header.at("layout_version").get<std::string>();
  m.config_hash = std::stoull(header.at("config_hash").get<std::string>(), nullptr, 16);
  m.labels = header.at("labels").get<std::vector<std::string>>();
  m.subset = feature_subset_from_string(header.at("subset").get<std::string>());
  m.dims = header.at("dims").get<std::vector<int>>();
  m.scaler.means = header.at("scaler").at("means").get<std::vector<double>>();
  m.scaler.stds = header.at("scaler").at("stds").get<std::vector<double>>();
  m.scaler.fitted_on = header.at("scaler").at("fitted_on").get<long>();

  uint64_t plen = 0;
  in.read(reinterpret_cast<char*>(&plen), sizeof plen);
  std::vector<char> payload(plen);
  in.read(payload.data(), long(plen));
  uint64_t digest = 0;
  in.read(reinterpret_cast<char*>(&digest), sizeof digest);
  if (!in) throw std::runtime_error("checkpoint: truncated file " + path);
  if (fnv1a64(payload.data(), payload.size()) != digest)
    throw std::runtime_error("checkpoint: integrity hash mismatch in " + path);

  size_t offset = 0;
  auto take = [&](double* p, size_t n) {
    if (offset + n * sizeof(double) > payload.size())
      throw std::runtime_error("checkpoint: payload too short in " + path);
    std::memcpy(p, payload.data() + offset, n * sizeof(double));
    offset += n * sizeof(double);
  };
  for (size_t l = 0; l + 1 < m.dims.size(); ++l) {
    Mat w(m.dims[l + 1], m.dims[l]);
    take(w.v.data(), w.v.size());
    std::vector<double> b((size_t(m.dims[l + 1])));
    take(b.data(), b.size());
    m.weights.push_back(std::move(w));
    m.biases.push_back(std::move(b));
  }
  if (offset != payload.size())
    throw std::runtime_error("checkpoint: trailing payload bytes in " + path);
  return m;
}

}  // namespace inkjet
