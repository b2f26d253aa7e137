#include "inkjet/featurize.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "inkjet/util.hpp"

using nlohmann::json;

namespace inkjet {

std::string to_string(FeatureSubset s) {
  switch (s) {
    case FeatureSubset::All: return "all";
    case FeatureSubset::SingleChannel: return "single_channel";
    default: return "frequency_only";
  }
}

FeatureSubset feature_subset_from_string(const std::string& s) {
  if (s == "all") return FeatureSubset::All;
  if (s == "single_channel") return FeatureSubset::SingleChannel;
  if (s == "frequency_only") return FeatureSubset::FrequencyOnly;
  throw std::invalid_argument("unknown feature subset: " + s);
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    names.reserve(kNumFeatures);
    names.emplace_back("contrast.y_max");
    names.emplace_back("contrast.y_min");
    names.emplace_back("contrast.michelson");
    for (int c = 0; c < kNumChannels; ++c) {
      std::string ch = channel_name(Channel(c));
      if (Channel(c) != Channel::Gray) {
        names.push_back(ch + ".pixel_mean");
        names.push_back(ch + ".pixel_std");
      }
      for (const char* s : DropletStats::stat_names()) names.push_back(ch + "." + s);
      for (int b = 0; b < kNumBands; ++b)
        for (const char* s : BandStats::stat_names())
          names.push_back(ch + ".band" + std::to_string(b + 1) + "." + s);
    }
    assert(int(names.size()) == kNumFeatures);
    return names;
  }();
  return kNames;
}

const std::vector<int>& subset_indices(FeatureSubset mode) {
  static const std::vector<int> kAll = [] {
    std::vector<int> v(kNumFeatures);
    for (int i = 0; i < kNumFeatures; ++i) v[size_t(i)] = i;
    return v;
  }();
  static const std::vector<int> kSingle = [] {
    std::vector<int> v = {0, 1, 2};
    const auto& names = feature_names();
    for (int i = 0; i < kNumFeatures; ++i)
      if (names[size_t(i)].rfind("gray.", 0) == 0) v.push_back(i);
    assert(int(v.size()) == 61);
    return v;
  }();
  static const std::vector<int> kFreq = [] {
    std::vector<int> v;
    const auto& names = feature_names();
    for (int i = 0; i < kNumFeatures; ++i)
      if (names[size_t(i)].find(".band") != std::string::npos) v.push_back(i);
    assert(int(v.size()) == 192);
    return v;
  }();
  switch (mode) {
    case FeatureSubset::All: return kAll;
    case FeatureSubset::SingleChannel: return kSingle;
    default: return kFreq;
  }
}

std::vector<double> feature_subset(const std::vector<double>& v, FeatureSubset mode) {
  if (int(v.size()) != kNumFeatures)
    throw std::invalid_argument("feature_subset: expected a full feature vector");
  if (mode == FeatureSubset::All) return v;
  const auto& idx = subset_indices(mode);
  std::vector<double> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(v[size_t(i)]);
  return out;
}

std::vector<double> extract_features(const Crop& crop, const FeatureParams& params) {
  for (const Plane& p : crop.planes)
    if (p.width != kCropSize || p.height != kCropSize)
      throw std::invalid_argument("extract_features: crop planes must be 256x256");

  std::vector<double> out;
  out.reserve(kNumFeatures);

  ContrastFeatures cf = contrast_features(crop.plane(Channel::Gray));
  out.push_back(cf.y_max);
  out.push_back(cf.y_min);
  out.push_back(cf.contrast);

  Mat m(kCropSize, kCropSize);
  for (int c = 0; c < kNumChannels; ++c) {
    const Plane& plane = crop.planes[size_t(c)];
    if (Channel(c) != Channel::Gray) {
      std::vector<double> px(plane.data.begin(), plane.data.end());
      double mean = mean_of(px);
      out.push_back(mean);
      out.push_back(std::sqrt(variance_of(px, mean)));
    }
    InkMask mask = make_ink_mask(plane, params.preprocess, Channel(c));
    DropletStats ds = droplet_stats(find_droplets(mask));
    for (double v : ds.as_array()) out.push_back(v);

    for (size_t i = 0; i < plane.data.size(); ++i) m.v[i] = double(plane.data[i]);
    SubBandSet sbs = analyze_plane(m, params.spectral);
    for (const auto& band : sbs.bands)
      for (double v : band_stats(band).as_array()) out.push_back(v);
  }
  assert(int(out.size()) == kNumFeatures);
  return out;
}

std::vector<int> Scaler::constant_dims() const {
  std::vector<int> out;
  for (size_t i = 0; i < stds.size(); ++i)
    if (stds[i] == 0.0) out.push_back(int(i));
  return out;
}

Scaler fit_scaler(const std::vector<std::vector<double>>& train_vectors) {
  if (train_vectors.size() < 2)
    throw std::invalid_argument("fit_scaler: need at least 2 training vectors");
  const size_t dim = train_vectors.front().size();
  for (const auto& v : train_vectors)
    if (v.size() != dim)
      throw std::invalid_argument("fit_scaler: inconsistent vector lengths");
  Scaler s;
  s.fitted_on = long(train_vectors.size());
  s.means.assign(dim, 0.0);
  s.stds.assign(dim, 0.0);
  const double n = double(train_vectors.size());
  for (const auto& v : train_vectors)
    for (size_t i = 0; i < dim; ++i) s.means[i] += v[i];
  for (size_t i = 0; i < dim; ++i) s.means[i] /= n;
  for (const auto& v : train_vectors)
    for (size_t i = 0; i < dim; ++i) {
      double d = v[i] - s.means[i];
      s.stds[i] += d * d;
    }
  for (size_t i = 0; i < dim; ++i) {
    double sd = std::sqrt(s.stds[i] / n);
    // round-off can leave a 1e-16 residue on constant features; snap those
    // to 0 so they are flagged instead of dividing by machine epsilon
    if (sd <= 1e-12 * std::max(1.0, std::abs(s.means[i]))) sd = 0.0;
    s.stds[i] = sd;
  }
  return s;
}

std::vector<double> apply_scaler(const std::vector<double>& v, const Scaler& s) {
  if (v.size() != s.means.size())
    throw std::invalid_argument("apply_scaler: dimension mismatch");
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out[i] = s.stds[i] > 0.0 ? (v[i] - s.means[i]) / s.stds[i] : 0.0;
  return out;
}

// --- Feature file ------------------------------------------------------

std::vector<const FeatureRow*> FeatureTable::split_rows(Split s) const {
  std::vector<const FeatureRow*> out;
  for (const auto& r : rows)
    if (r.split == s) out.push_back(&r);
  return out;
}

namespace {

constexpr char kMagic[4] = {'I', 'J', 'F', 'V'};
constexpr uint32_t kBinaryVersion = 1;

bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

json header_json(const FeatureTable& t) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)t.config_hash);
  return json{{"layout_version", t.layout_version},
              {"config_hash", hex},
              {"feature_names", t.names},
              {"dim", t.names.size()},
              {"rows", t.rows.size()}};
}

void parse_header(const json& j, FeatureTable& t) {
  t.layout_version = j.at("layout_version").get<std::string>();
  t.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
  t.names = j.at("feature_names").get<std::vector<std::string>>();
}

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_raw(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
}

void write_str(std::ostream& out, const std::string& s) {
  write_raw(out, uint32_t(s.size()));
  out.write(s.data(), long(s.size()));
}

std::string read_str(std::istream& in) {
  uint32_t n = 0;
  read_raw(in, n);
  std::string s(n, '\0');
  in.read(s.data(), long(n));
  return s;
}

}  // namespace

void save_feature_table(const FeatureTable& t, const std::string& path) {
  if (has_suffix(path, ".jsonl")) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("feature file: cannot write " + path);
    out << header_json(t).dump() << "\n";
    for (const auto& r : t.rows) {
      json j{{"scan_id", r.scan_id}, {"label", r.label},
             {"split", to_string(r.split)}, {"x", r.x},
             {"y", r.y},           {"values", r.values}};
      out << j.dump() << "\n";
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("feature file: cannot write " + path);
  out.write(kMagic, 4);
  write_raw(out, kBinaryVersion);
  std::string header = header_json(t).dump();
  write_raw(out, uint64_t(header.size()));
  out.write(header.data(), long(header.size()));
  for (const auto& r : t.rows) {
    write_str(out, r.scan_id);
    write_str(out, r.label);
    write_raw(out, uint8_t(r.split == Split::Val ? 1 : 0));
    write_raw(out, int32_t(r.x));
    write_raw(out, int32_t(r.y));
    out.write(reinterpret_cast<const char*>(r.values.data()),
              long(r.values.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("feature file: write failed: " + path);
}

FeatureTable load_feature_table(const std::string& path) {
  FeatureTable t;
  if (has_suffix(path, ".jsonl")) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("feature file: cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
      throw std::runtime_error("feature file: empty file " + path);
    parse_header(json::parse(line), t);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      FeatureRow r;
      r.scan_id = j.at("scan_id").get<std::string>();
      r.label = j.at("label").get<std::string>();
      r.split = split_from_string(j.at("split").get<std::string>());
      r.x = j.at("x").get<int>();
      r.y = j.at("y").get<int>();
      r.values = j.at("values").get<std::vector<double>>();
      t.rows.push_back(std::move(r));
    }
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("feature file: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
      throw std::runtime_error("feature file: bad magic in " + path);
    uint32_t version = 0;
    read_raw(in, version);
    if (version != kBinaryVersion)
      throw std::runtime_error("feature file: unsupported version in " + path);
    uint64_t hlen = 0;
    read_raw(in, hlen);
    std::string header(hlen, '\0');
    in.read(header.data(), long(hlen));
    json h = json::parse(header);
    parse_header(h, t);
    uint64_t rows = h.at("rows").get<uint64_t>();
    uint64_t dim = h.at("dim").get<uint64_t>();
    for (uint64_t i = 0; i < rows; ++i) {
      FeatureRow r;
      r.scan_id = read_str(in);
      r.label = read_str(in);
      uint8_t split = 0;
      read_raw(in, split);
      r.split = split ? Split::Val : Split::Train;
      int32_t x = 0, y = 0;
      read_raw(in, x);
      read_raw(in, y);
      r.x = x;
      r.y = y;
      r.values.resize(dim);
      in.read(reinterpret_cast<char*>(r.values.data()), long(dim * sizeof(double)));
      if (!in) throw std::runtime_error("feature file: truncated " + path);
      t.rows.push_back(std::move(r));
    }
  }
  for (const auto& r : t.rows)
    if (r.values.size() != t.names.size())
      throw std::runtime_error("feature file: row dimension mismatch in " + path);
  return t;
}

}  // namespace inkjet
