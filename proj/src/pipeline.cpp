#include "inkjet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "inkjet/imageio.hpp"
#include "inkjet/sampling.hpp"
#include "inkjet/util.hpp"

namespace inkjet {

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers < 1) workers = 1;
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

FeatureTable extract_manifest_features(const Manifest& manifest,
                                       const PipelineConfig& config, int workers,
                                       bool progress) {
  config.validate();
  FeatureTable table;
  table.config_hash = config.hash();
  table.names = feature_names();

  FeatureParams fp{config.spectral, config.preprocess};
  SamplingParams sp;
  sp.filter.min_droplets = config.crops.min_droplets;
  sp.preprocess = config.preprocess;
  sp.retry_budget = config.crops.retry_budget;

  const int n = int(manifest.entries.size());
  std::vector<std::vector<FeatureRow>> per_doc((size_t(n)));
  std::mutex log_mutex;
  std::atomic<int> done{0};

  parallel_for(n, workers, [&](int i) {
    const ManifestEntry& entry = manifest.entries[size_t(i)];
    ScanDocument doc = load_scan(entry, manifest.base_dir);
    uint64_t seed = config.crops.seed ^ fnv1a64(entry.scan_id);
    std::vector<Crop> crops = sample_crops(doc, config.crops.count, seed, sp);
    std::vector<FeatureRow>& rows = per_doc[size_t(i)];
    rows.reserve(crops.size());
    for (const Crop& crop : crops) {
      FeatureRow r;
      r.scan_id = entry.scan_id;
      r.label = entry.printer_model;
      r.split = entry.split;
      r.x = crop.x0;
      r.y = crop.y0;
      r.values = extract_features(crop, fp);
      rows.push_back(std::move(r));
    }
    if (progress) {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "[" << ++done << "/" << n << "] " << entry.scan_id << ": "
                << rows.size() << " crops\n";
    }
  });

  for (auto& rows : per_doc)
    for (auto& r : rows) table.rows.push_back(std::move(r));
  return table;
}

PreparedData prepare_samples(const FeatureTable& table, const PipelineConfig& config) {
  config.validate();
  const auto& idx = subset_indices(config.subset);

  PreparedData out;
  std::set<std::string> train_labels;
  for (const auto& r : table.rows)
    if (r.split == Split::Train) train_labels.insert(r.label);
  if (train_labels.size() < 2)
    throw std::runtime_error("prepare_samples: need at least 2 training classes");
  out.labels.assign(train_labels.begin(), train_labels.end());
  std::map<std::string, int> label_index;
  for (size_t i = 0; i < out.labels.size(); ++i) label_index[out.labels[i]] = int(i);
  for (const auto& r : table.rows)
    if (r.split == Split::Val && !label_index.count(r.label))
      throw std::runtime_error("prepare_samples: class '" + r.label +
                               "' appears in val but not in train");

  auto subset_values = [&](const FeatureRow& r) {
    std::vector<double> v;
    v.reserve(idx.size());
    for (int i : idx) v.push_back(r.values[size_t(i)]);
    return v;
  };

  // scaler is fitted on training crops only
  std::vector<std::vector<double>> train_vectors;
  for (const auto& r : table.rows)
    if (r.split == Split::Train) train_vectors.push_back(subset_values(r));
  out.scaler = fit_scaler(train_vectors);

  auto build = [&](Split split) {
    SampleSet set;
    std::vector<std::vector<double>> rows;
    for (const auto& r : table.rows) {
      if (r.split != split) continue;
      rows.push_back(apply_scaler(subset_values(r), out.scaler));
      set.y.push_back(label_index.at(r.label));
      set.doc.push_back(r.scan_id);
    }
    set.x = Mat(int(rows.size()), int(idx.size()));
    for (size_t i = 0; i < rows.size(); ++i)
      std::copy(rows[i].begin(), rows[i].end(), set.x.row(int(i)));
    return set;
  };
  out.train = build(Split::Train);
  out.val = build(Split::Val);

  // feature-side aggregation replaces training crops by document means
  if (config.aggregation.point == AggregationConfig::Point::BeforePrediction &&
      config.aggregation.train_aggregated) {
    std::map<std::string, int> doc_index;
    std::vector<int> doc_labels;
    std::vector<double> count;
    Mat sums;
    std::vector<std::string> doc_names;
    for (int r = 0; r < out.train.count(); ++r) {
      auto [it, inserted] =
          doc_index.try_emplace(out.train.doc[size_t(r)], int(doc_index.size()));
      if (inserted) {
        doc_labels.push_back(out.train.y[size_t(r)]);
        doc_names.push_back(out.train.doc[size_t(r)]);
        count.push_back(0.0);
      }
    }
    sums = Mat(int(doc_index.size()), out.train.x.cols);
    for (int r = 0; r < out.train.count(); ++r) {
      int g = doc_index.at(out.train.doc[size_t(r)]);
      count[size_t(g)] += 1.0;
      for (int c = 0; c < out.train.x.cols; ++c) sums.at(g, c) += out.train.x.at(r, c);
    }
    for (int g = 0; g < sums.rows; ++g)
      for (int c = 0; c < sums.cols; ++c) sums.at(g, c) /= count[size_t(g)];
    SampleSet agg;
    agg.x = std::move(sums);
    agg.y = std::move(doc_labels);
    agg.doc = std::move(doc_names);
    out.train = std::move(agg);
  }
  return out;
}

TrainResult train_on_table(const FeatureTable& table, const PipelineConfig& config,
                           uint64_t seed) {
  PreparedData data = prepare_samples(table, config);
  MlpModel proto = init_mlp(data.train.x.cols, config.train.hidden,
                            int(data.labels.size()), seed);
  proto.labels = data.labels;
  proto.scaler = data.scaler;
  proto.subset = config.subset;
  proto.layout_version = table.layout_version;
  proto.config_hash = config.hash();
  TrainConfig tc = config.train;
  tc.seed = seed;
  return train(proto, data.train, data.val, tc, config.aggregation);
}

namespace {

struct UnitLogits {
  std::vector<std::vector<double>> logits;
  std::vector<int> labels;
};

// evaluation units: documents when val-side aggregation is on, crops otherwise
UnitLogits unit_logits(const MlpModel& model, const SampleSet& val,
                       const AggregationConfig& agg) {
  UnitLogits out;
  const int k = model.num_classes();
  if (agg.val_aggregated && agg.point == AggregationConfig::Point::BeforePrediction) {
    std::map<std::string, int> doc_index;
    std::vector<double> count;
    Mat sums;
    for (int r = 0; r < val.count(); ++r) {
      auto [it, inserted] = doc_index.try_emplace(val.doc[size_t(r)], int(doc_index.size()));
      if (inserted) {
        out.labels.push_back(val.y[size_t(r)]);
        count.push_back(0.0);
      }
    }
    sums = Mat(int(doc_index.size()), val.x.cols);
    for (int r = 0; r < val.count(); ++r) {
      int g = doc_index.at(val.doc[size_t(r)]);
      count[size_t(g)] += 1.0;
      for (int c = 0; c < val.x.cols; ++c) sums.at(g, c) += val.x.at(r, c);
    }
    for (int g = 0; g < sums.rows; ++g)
      for (int c = 0; c < sums.cols; ++c) sums.at(g, c) /= count[size_t(g)];
    Mat logits = model.forward_batch(sums);
    out.logits.resize(size_t(logits.rows));
    for (int r = 0; r < logits.rows; ++r)
      out.logits[size_t(r)].assign(logits.row(r), logits.row(r) + k);
    return out;
  }

  Mat logits = model.forward_batch(val.x);
  if (!agg.val_aggregated) {
    out.logits.resize(size_t(logits.rows));
    for (int r = 0; r < logits.rows; ++r)
      out.logits[size_t(r)].assign(logits.row(r), logits.row(r) + k);
    out.labels = val.y;
    return out;
  }
  std::map<std::string, int> doc_index;
  for (int r = 0; r < logits.rows; ++r) {
    auto [it, inserted] = doc_index.try_emplace(val.doc[size_t(r)], int(doc_index.size()));
    if (inserted) {
      out.labels.push_back(val.y[size_t(r)]);
      out.logits.emplace_back(size_t(k), 0.0);
    }
  }
  std::vector<double> count(out.logits.size(), 0.0);
  for (int r = 0; r < logits.rows; ++r) {
    int g = doc_index.at(val.doc[size_t(r)]);
    count[size_t(g)] += 1.0;
    for (int c = 0; c < k; ++c) out.logits[size_t(g)][size_t(c)] += logits.at(r, c);
  }
  for (size_t g = 0; g < out.logits.size(); ++g)
    for (int c = 0; c < k; ++c) out.logits[g][size_t(c)] /= count[g];
  return out;
}

SeedScores score_units(const UnitLogits& units, int k, uint64_t seed) {
  SeedScores s;
  s.seed = seed;
  for (int n = 1; n <= kMaxTopN; ++n)
    s.f1_top_n[size_t(n - 1)] = top_n_f1(units.logits, units.labels, std::min(n, k), k);
  return s;
}

}  // namespace

EvalReport evaluate_run(const FeatureTable& table, const PipelineConfig& config,
                        const std::vector<uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("evaluate_run: need at least one seed");
  PreparedData data = prepare_samples(table, config);
  if (data.val.count() == 0)
    throw std::runtime_error("evaluate_run: feature table has no val split");

  EvalReport report;
  report.labels = data.labels;
  report.granularity = config.aggregation.val_aggregated ? "per_document" : "per_crop";
  const int k = int(data.labels.size());
  report.confusion.assign(size_t(k), std::vector<long>(size_t(k), 0));

  for (uint64_t seed : seeds) {
    MlpModel proto = init_mlp(data.train.x.cols, config.train.hidden, k, seed);
    proto.labels = data.labels;
    proto.scaler = data.scaler;
    proto.subset = config.subset;
    proto.layout_version = table.layout_version;
    proto.config_hash = config.hash();
    TrainConfig tc = config.train;
    tc.seed = seed;
    TrainResult result = train(proto, data.train, data.val, tc, config.aggregation);

    UnitLogits units = unit_logits(result.model, data.val, config.aggregation);
    report.per_seed.push_back(score_units(units, k, seed));
    auto preds = top_n_scored_predictions(units.logits, units.labels, 1);
    auto cm = confusion_matrix(preds, units.labels, k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) report.confusion[size_t(r)][size_t(c)] += cm[size_t(r)][size_t(c)];
  }
  report.finalize();
  return report;
}

SeedScores evaluate_model(const MlpModel& model, const FeatureTable& table,
                          const AggregationConfig& agg,
                          std::vector<std::vector<long>>* confusion) {
  agg.validate();
  if (table.layout_version != model.layout_version)
    throw std::runtime_error("evaluate_model: feature layout '" + table.layout_version +
                             "' does not match checkpoint layout '" +
                             model.layout_version + "'");
  std::map<std::string, int> label_index;
  for (size_t i = 0; i < model.labels.size(); ++i) label_index[model.labels[i]] = int(i);

  SampleSet val;
  std::vector<std::vector<double>> rows;
  for (const auto& r : table.rows) {
    if (r.split != Split::Val) continue;
    auto it = label_index.find(r.label);
    if (it == label_index.end())
      throw std::runtime_error("evaluate_model: class '" + r.label +
                               "' missing from checkpoint label map");
    rows.push_back(model.prepare_input(r.values));
    val.y.push_back(it->second);
    val.doc.push_back(r.scan_id);
  }
  if (rows.empty()) throw std::runtime_error("evaluate_model: no val rows in table");
  val.x = Mat(int(rows.size()), int(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), val.x.row(int(i)));

  UnitLogits units = unit_logits(model, val, agg);
  const int k = model.num_classes();
  if (confusion) {
    auto preds = top_n_scored_predictions(units.logits, units.labels, 1);
    *confusion = confusion_matrix(preds, units.labels, k);
  }
  return score_units(units, k, 0);
}

std::vector<RankedPrediction> predict_scan(const MlpModel& model,
                                           const ScanDocument& doc,
                                           const PipelineConfig& config, int workers) {
  config.validate();
  if (model.layout_version != kLayoutVersion)
    throw std::runtime_error("predict: checkpoint layout '" + model.layout_version +
                             "' does not match this build's '" + kLayoutVersion + "'");
  SamplingParams sp;
  sp.filter.min_droplets = config.crops.min_droplets;
  sp.preprocess = config.preprocess;
  sp.retry_budget = config.crops.retry_budget;
  uint64_t seed = config.crops.seed ^ fnv1a64(doc.scan_id);
  std::vector<Crop> crops = sample_crops(doc, config.crops.count, seed, sp);
  if (crops.empty()) throw std::runtime_error("predict: no valid crops found");

  FeatureParams fp{config.spectral, config.preprocess};
  std::vector<std::vector<double>> logits(crops.size());
  parallel_for(int(crops.size()), workers, [&](int i) {
    auto features = extract_features(crops[size_t(i)], fp);
    logits[size_t(i)] = model.forward(model.prepare_input(features));
  });

  std::vector<double> mean = aggregate_logits(logits);
  std::vector<int> order(mean.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return mean[size_t(a)] > mean[size_t(b)]; });
  std::vector<RankedPrediction> out;
  out.reserve(order.size());
  for (int c : order) out.push_back({model.labels[size_t(c)], mean[size_t(c)]});
  return out;
}

void render_confusion_png(const std::vector<std::vector<long>>& confusion,
                          const std::string& path) {
  const int k = int(confusion.size());
  if (k == 0) throw std::invalid_argument("render_confusion_png: empty matrix");
  long maxv = 1;
  for (const auto& row : confusion)
    for (long v : row) maxv = std::max(maxv, v);
  const int cell = 24, border = 1;
  const int size = k * cell + (k + 1) * border;
  RgbImage img;
  img.r = Plane(size, size, 255, 200);
  img.g = Plane(size, size, 255, 200);
  img.b = Plane(size, size, 255, 200);
  for (int row = 0; row < k; ++row)
    for (int col = 0; col < k; ++col) {
      double t = double(confusion[size_t(row)][size_t(col)]) / double(maxv);
      // white -> blue ramp
      uint16_t rC = uint16_t(std::lround(255.0 * (1.0 - 0.85 * t)));
      uint16_t gC = uint16_t(std::lround(255.0 * (1.0 - 0.65 * t)));
      uint16_t bC = 255;
      int y0 = border + row * (cell + border);
      int x0 = border + col * (cell + border);
      for (int y = y0; y < y0 + cell; ++y)
        for (int x = x0; x < x0 + cell; ++x) {
          img.r.at(x, y) = rC;
          img.g.at(x, y) = gC;
          img.b.at(x, y) = bC;
        }
    }
  write_png(path, img);
}

}  // namespace inkjet
