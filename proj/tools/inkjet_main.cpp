// Command-line frontend: synth | extract | fit-scaler | train | eval | predict.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "inkjet/imageio.hpp"
#include "inkjet/pipeline.hpp"
#include "inkjet/synthgen.hpp"

using namespace inkjet;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> method;
  std::optional<std::string> mode;
  std::optional<int> crops;
  int workers = int(std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "pipeline config JSON");
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--method", opts.method, "spectral method: fft | stft | dwt");
  cmd->add_option("--mode", opts.mode, "spectral mode: rowwise_1d | full_2d");
  cmd->add_option("--crops", opts.crops, "crops per document");
  cmd->add_option("--workers", opts.workers, "worker threads");
}

PipelineConfig resolve_config(const CommonOpts& opts) {
  PipelineConfig config = opts.config_path.empty()
                              ? PipelineConfig{}
                              : PipelineConfig::load(opts.config_path);
  if (opts.method) config.spectral.method = spectral_method_from_string(*opts.method);
  if (opts.mode) config.spectral.mode = spectral_mode_from_string(*opts.mode);
  if (opts.crops) config.crops.count = *opts.crops;
  if (opts.seed) {
    config.crops.seed = *opts.seed;
    config.train.seed = *opts.seed;
    config.synth.seed = *opts.seed;
  }
  config.validate();
  return config;
}

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

std::vector<uint64_t> parse_seeds(const std::string& csv) {
  std::vector<uint64_t> seeds;
  std::string token;
  std::stringstream ss(csv);
  while (std::getline(ss, token, ',')) seeds.push_back(std::stoull(token));
  if (seeds.empty()) throw CLI::ValidationError("--seeds", "needs at least one seed");
  return seeds;
}

json report_to_json(const EvalReport& report, uint64_t config_hash) {
  json per_seed = json::array();
  for (const auto& s : report.per_seed) {
    json f1;
    for (int n = 0; n < kMaxTopN; ++n)
      f1["top" + std::to_string(n + 1)] = s.f1_top_n[size_t(n)];
    per_seed.push_back({{"seed", s.seed}, {"f1", f1}});
  }
  json f1;
  for (int n = 0; n < kMaxTopN; ++n) {
    f1["top" + std::to_string(n + 1)] = {{"mean", report.f1_mean[size_t(n)]},
                                         {"std", report.f1_std[size_t(n)]}};
  }
  return json{{"config_hash", hash_hex(config_hash)},
              {"granularity", report.granularity},
              {"labels", report.labels},
              {"f1", f1},
              {"per_seed", per_seed},
              {"confusion", report.confusion}};
}

void print_report(const EvalReport& report) {
  std::cout << "granularity: " << report.granularity << "\n";
  std::cout.setf(std::ios::fixed);
  std::cout.precision(1);
  for (int n = 0; n < kMaxTopN; ++n)
    std::cout << "Top-" << (n + 1) << " F1: " << 100.0 * report.f1_mean[size_t(n)]
              << " +- " << 100.0 * report.f1_std[size_t(n)] << "\n";
}

int cmd_synth(const CommonOpts& common, const std::string& out_dir,
              std::optional<int> profiles, std::optional<int> docs) {
  PipelineConfig config = resolve_config(common);
  if (profiles) config.synth.profiles = *profiles;
  if (docs) config.synth.docs_per_profile = *docs;
  auto specs = config.synth.identical_profiles
                   ? make_identical_profiles(config.synth.profiles, config.synth.seed)
                   : make_profile_grid(config.synth.profiles, config.synth.seed);
  Manifest m = make_synthetic_dataset(specs, config.synth.docs_per_profile, out_dir,
                                      config.synth.canvas, config.synth.dpi);
  json meta{{"config_hash", hash_hex(config.hash())},
            {"profiles", config.synth.profiles},
            {"docs_per_profile", config.synth.docs_per_profile},
            {"identical_profiles", config.synth.identical_profiles},
            {"seed", config.synth.seed}};
  std::ofstream(fs::path(out_dir) / "synth_meta.json") << meta.dump(2) << "\n";
  std::cout << "wrote " << m.entries.size() << " documents + manifest to " << out_dir
            << "\n";
  return 0;
}

int cmd_extract(const CommonOpts& common, const std::string& manifest_path,
                const std::string& out_path) {
  PipelineConfig config = resolve_config(common);
  Manifest manifest = load_manifest(manifest_path);
  auto t0 = std::chrono::steady_clock::now();
  FeatureTable table = extract_manifest_features(manifest, config, common.workers, true);
  auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
  save_feature_table(table, out_path);
  std::cout << "wrote " << table.rows.size() << " feature rows ("
            << table.names.size() << " features each) to " << out_path << " in "
            << dt.count() << " s\n";
  return 0;
}

int cmd_fit_scaler(const std::string& features_path, const std::string& out_path) {
  FeatureTable table = load_feature_table(features_path);
  std::vector<std::vector<double>> train_vectors;
  for (const auto& r : table.rows)
    if (r.split == Split::Train) train_vectors.push_back(r.values);
  Scaler scaler = fit_scaler(train_vectors);
  json j{{"layout_version", table.layout_version},
         {"config_hash", hash_hex(table.config_hash)},
         {"fitted_on", scaler.fitted_on},
         {"means", scaler.means},
         {"stds", scaler.stds},
         {"constant_dims", scaler.constant_dims()}};
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << j.dump(2) << "\n";
  std::cout << "fitted scaler on " << scaler.fitted_on << " training crops ("
            << scaler.constant_dims().size() << " constant dims) -> " << out_path
            << "\n";
  return 0;
}

int cmd_train(const CommonOpts& common, const std::string& features_path,
              const std::string& out_path) {
  PipelineConfig config = resolve_config(common);
  FeatureTable table = load_feature_table(features_path);
  if (table.layout_version != kLayoutVersion)
    throw std::runtime_error("feature layout " + table.layout_version +
                             " does not match this build (" + kLayoutVersion + ")");
  auto t0 = std::chrono::steady_clock::now();
  TrainResult result = train_on_table(table, config, config.train.seed);
  auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
  save_checkpoint(result.model, out_path);
  std::cout << "trained " << result.log.size() << " epochs in " << dt.count()
            << " s; best val Top-1 F1 " << result.best_val_f1 << " at epoch "
            << result.best_epoch << "\ncheckpoint -> " << out_path << "\n";
  return 0;
}

int cmd_eval(const CommonOpts& common, const std::string& features_path,
             const std::string& checkpoint_path, const std::string& seeds_csv,
             const std::string& report_path, const std::string& confusion_path) {
  PipelineConfig config = resolve_config(common);
  FeatureTable table = load_feature_table(features_path);
  EvalReport report;
  if (!checkpoint_path.empty()) {
    MlpModel model = load_checkpoint(checkpoint_path);
    report.labels = model.labels;
    report.granularity =
        config.aggregation.val_aggregated ? "per_document" : "per_crop";
    std::vector<std::vector<long>> confusion;
    report.per_seed.push_back(
        evaluate_model(model, table, config.aggregation, &confusion));
    report.confusion = std::move(confusion);
    report.finalize();
  } else {
    report = evaluate_run(table, config, parse_seeds(seeds_csv));
  }
  print_report(report);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw std::runtime_error("cannot write " + report_path);
    out << report_to_json(report, config.hash()).dump(2) << "\n";
    std::cout << "report -> " << report_path << "\n";
  }
  if (!confusion_path.empty()) {
    render_confusion_png(report.confusion, confusion_path);
    std::cout << "confusion matrix image -> " << confusion_path << "\n";
  }
  return 0;
}

int cmd_predict(const CommonOpts& common, const std::string& checkpoint_path,
                const std::string& image_path, int top) {
  PipelineConfig config = resolve_config(common);
  MlpModel model = load_checkpoint(checkpoint_path);
  ScanDocument doc;
  doc.image = read_image(image_path);
  doc.scan_id = fs::path(image_path).filename().string();
  auto ranked = predict_scan(model, doc, config, common.workers);
  const int limit = std::min<int>(top, int(ranked.size()));
  std::cout << "top " << limit << " of " << ranked.size() << " classes ("
            << config.crops.count << " crops aggregated):\n";
  std::cout.setf(std::ios::fixed);
  std::cout.precision(4);
  for (int i = 0; i < limit; ++i)
    std::cout << "  " << (i + 1) << ". " << ranked[size_t(i)].label
              << "  (mean logit " << ranked[size_t(i)].mean_logit << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inkjet printer model identification from droplet statistics"};
  app.require_subcommand(1);

  CommonOpts common;

  auto* synth = app.add_subcommand("synth", "render a synthetic droplet dataset");
  std::string synth_out = "synth_data";
  std::optional<int> synth_profiles, synth_docs;
  add_common(synth, common);
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--profiles", synth_profiles, "number of printer profiles");
  synth->add_option("--docs", synth_docs, "documents per profile");

  auto* extract = app.add_subcommand("extract", "extract crop features from scans");
  std::string manifest_path, extract_out = "features.bin";
  add_common(extract, common);
  extract->add_option("--manifest", manifest_path, "dataset manifest (JSONL)")
      ->required();
  extract->add_option("--out", extract_out, "feature file (.bin or .jsonl)");

  auto* fit = app.add_subcommand("fit-scaler", "fit standardization statistics");
  std::string fit_features, fit_out = "scaler.json";
  fit->add_option("--features", fit_features, "feature file")->required();
  fit->add_option("--out", fit_out, "scaler JSON output");

  auto* train_cmd = app.add_subcommand("train", "train the MLP classifier");
  std::string train_features, train_out = "model.ckpt";
  add_common(train_cmd, common);
  train_cmd->add_option("--features", train_features, "feature file")->required();
  train_cmd->add_option("--out", train_out, "checkpoint output");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate on the validation split");
  std::string eval_features, eval_checkpoint, eval_seeds = "0,1,2";
  std::string eval_report, eval_confusion;
  add_common(eval_cmd, common);
  eval_cmd->add_option("--features", eval_features, "feature file")->required();
  eval_cmd->add_option("--checkpoint", eval_checkpoint,
                       "evaluate this checkpoint instead of retraining per seed");
  eval_cmd->add_option("--seeds", eval_seeds, "comma-separated training seeds");
  eval_cmd->add_option("--report", eval_report, "write the JSON report here");
  eval_cmd->add_option("--confusion-image", eval_confusion,
                       "render the confusion matrix heatmap here");

  auto* predict = app.add_subcommand("predict", "rank printer models for one scan");
  std::string predict_checkpoint, predict_image;
  int predict_top = 5;
  add_common(predict, common);
  predict->add_option("--checkpoint", predict_checkpoint, "trained checkpoint")
      ->required();
  predict->add_option("--image", predict_image, "scan image (PNG/TIFF)")->required();
  predict->add_option("--top", predict_top, "number of classes to print");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(common, synth_out, synth_profiles, synth_docs);
    if (extract->parsed()) return cmd_extract(common, manifest_path, extract_out);
    if (fit->parsed()) return cmd_fit_scaler(fit_features, fit_out);
    if (train_cmd->parsed()) return cmd_train(common, train_features, train_out);
    if (eval_cmd->parsed())
      return cmd_eval(common, eval_features, eval_checkpoint, eval_seeds, eval_report,
                      eval_confusion);
    if (predict->parsed())
      return cmd_predict(common, predict_checkpoint, predict_image, predict_top);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
