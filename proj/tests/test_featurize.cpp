#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>

#include "inkjet/featurize.hpp"
#include "inkjet/util.hpp"

using namespace inkjet;
namespace fs = std::filesystem;

namespace {

int fidx(const std::string& name) {
  const auto& names = feature_names();
  for (int i = 0; i < int(names.size()); ++i)
    if (names[size_t(i)] == name) return i;
  FAIL("unknown feature: ", name);
  return -1;
}

Crop synthetic_crop(uint64_t seed, double fill = 0.03) {
  Rng rng(seed);
  Crop c;
  for (int ch = 0; ch < 3; ++ch) c.planes[size_t(ch)] = Plane(kCropSize, kCropSize, 255, 255);
  for (int y = 0; y < kCropSize; ++y)
    for (int x = 0; x < kCropSize; ++x)
      if (rng.uniform() < fill) {
        c.planes[0].at(x, y) = uint16_t(rng.uniform_int(0, 80));
        c.planes[1].at(x, y) = uint16_t(rng.uniform_int(0, 80));
        c.planes[2].at(x, y) = uint16_t(rng.uniform_int(0, 80));
      }
  c.planes[int(Channel::Gray)] = to_grayscale(c.planes[0], c.planes[1], c.planes[2]);
  c.source_scan = "synthetic";
  c.label = "test";
  return c;
}

Crop white_crop() {
  Crop c;
  for (int ch = 0; ch < 3; ++ch) c.planes[size_t(ch)] = Plane(kCropSize, kCropSize, 255, 255);
  c.planes[int(Channel::Gray)] = to_grayscale(c.planes[0], c.planes[1], c.planes[2]);
  return c;
}

}  // namespace

TEST_CASE("feature layout arithmetic") {
  CHECK(feature_names().size() == size_t(kNumFeatures));
  CHECK(subset_indices(FeatureSubset::All).size() == 241);
  CHECK(subset_indices(FeatureSubset::SingleChannel).size() == 61);
  CHECK(subset_indices(FeatureSubset::FrequencyOnly).size() == 192);
}

TEST_CASE("extract_features yields 241 values, deterministically") {
  FeatureParams params;
  Crop crop = synthetic_crop(1);
  auto a = extract_features(crop, params);
  auto b = extract_features(crop, params);
  CHECK(a.size() == size_t(kNumFeatures));
  CHECK(a == b);  // bit-identical
}

TEST_CASE("all-white crop: zero droplet stats, zero contrast, DC-only spectrum") {
  FeatureParams params;
  params.spectral.method = SpectralMethod::Fft;
  auto v = extract_features(white_crop(), params);
  CHECK(v[size_t(fidx("contrast.michelson"))] == 0.0);
  for (const char* ch : {"r", "g", "b", "gray"}) {
    CHECK(v[size_t(fidx(std::string(ch) + ".area_mean"))] == 0.0);
    CHECK(v[size_t(fidx(std::string(ch) + ".perim_p75"))] == 0.0);
    // all spectral energy in band1; bands 2-4 have zero rms
    CHECK(v[size_t(fidx(std::string(ch) + ".band1.rms"))] > 0.0);
    CHECK(v[size_t(fidx(std::string(ch) + ".band4.rms"))] == 0.0);
  }
}

TEST_CASE("feature subsets pick the documented blocks") {
  FeatureParams params;
  auto v = extract_features(synthetic_crop(2), params);
  auto all = feature_subset(v, FeatureSubset::All);
  CHECK(all == v);
  auto single = feature_subset(v, FeatureSubset::SingleChannel);
  REQUIRE(single.size() == 61);
  CHECK(single[0] == v[0]);  // contrast block kept
  CHECK(single[3] == v[size_t(fidx("gray.area_mean"))]);
  auto freq = feature_subset(v, FeatureSubset::FrequencyOnly);
  REQUIRE(freq.size() == 192);
  CHECK(freq[0] == v[size_t(fidx("r.band1.entropy"))]);
}

TEST_CASE("fit_scaler on two simple vectors") {
  std::vector<std::vector<double>> vs = {{0.0, 4.0}, {2.0, 4.0}};
  Scaler s = fit_scaler(vs);
  CHECK(s.means[0] == doctest::Approx(1.0));
  CHECK(s.stds[0] == doctest::Approx(1.0));  // population std
  CHECK(s.stds[1] == 0.0);
  CHECK(s.constant_dims() == std::vector<int>{1});
  CHECK(s.fitted_on == 2);
}

TEST_CASE("fit_scaler rejects degenerate input") {
  CHECK_THROWS_AS(fit_scaler({}), std::invalid_argument);
  CHECK_THROWS_AS(fit_scaler({{1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_scaler({{1.0}, {1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("fit_scaler matches a naive two-pass oracle") {
  Rng rng(3);
  std::vector<std::vector<double>> vs;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> v(7);
    for (double& x : v) x = rng.uniform(-100.0, 100.0);
    vs.push_back(v);
  }
  Scaler s = fit_scaler(vs);
  for (size_t d = 0; d < 7; ++d) {
    double mean = 0.0;
    for (const auto& v : vs) mean += v[d];
    mean /= double(vs.size());
    double var = 0.0;
    for (const auto& v : vs) var += (v[d] - mean) * (v[d] - mean);
    var /= double(vs.size());
    CHECK(s.means[d] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.stds[d] == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  }
}

TEST_CASE("apply_scaler standardizes the training set") {
  Rng rng(4);
  std::vector<std::vector<double>> vs;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> v(5);
    for (size_t d = 0; d + 1 < v.size(); ++d) v[d] = rng.uniform(-3.0, 9.0);
    v.back() = 7.0;  // constant feature
    vs.push_back(v);
  }
  Scaler s = fit_scaler(vs);
  CHECK(apply_scaler(s.means, s) == std::vector<double>(5, 0.0));
  std::vector<std::vector<double>> scaled;
  for (const auto& v : vs) scaled.push_back(apply_scaler(v, s));
  for (size_t d = 0; d < 5; ++d) {
    double mean = 0.0;
    for (const auto& v : scaled) mean += v[d];
    mean /= double(scaled.size());
    CHECK(std::abs(mean) < 1e-9);
    if (d + 1 < 5) {
      double var = 0.0;
      for (const auto& v : scaled) var += (v[d] - mean) * (v[d] - mean);
      var /= double(scaled.size());
      CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-6);
    } else {
      for (const auto& v : scaled) CHECK(v[d] == 0.0);  // constant dim maps to 0
    }
  }
  CHECK_THROWS_AS(apply_scaler({1.0}, s), std::invalid_argument);
}

TEST_CASE("feature table round-trips in both encodings") {
  FeatureTable t;
  t.config_hash = 0xdeadbeefcafe1234ull;
  t.names = feature_names();
  Rng rng(5);
  for (int i = 0; i < 7; ++i) {
    FeatureRow r;
    r.scan_id = "scan-" + std::to_string(i / 2);
    r.label = "model-" + std::to_string(i % 3);
    r.split = i % 2 == 0 ? Split::Train : Split::Val;
    r.x = int(rng.uniform_int(0, 1000));
    r.y = int(rng.uniform_int(0, 1000));
    r.values.resize(size_t(kNumFeatures));
    for (double& v : r.values) v = rng.uniform(-1e6, 1e6);
    t.rows.push_back(std::move(r));
  }
  fs::path dir = fs::temp_directory_path() / "inkjet_test_features";
  fs::create_directories(dir);
  for (const char* name : {"t.bin", "t.jsonl"}) {
    std::string path = (dir / name).string();
    save_feature_table(t, path);
    FeatureTable back = load_feature_table(path);
    CHECK(back.layout_version == t.layout_version);
    CHECK(back.config_hash == t.config_hash);
    CHECK(back.names == t.names);
    REQUIRE(back.rows.size() == t.rows.size());
    for (size_t i = 0; i < t.rows.size(); ++i) {
      CHECK(back.rows[i].scan_id == t.rows[i].scan_id);
      CHECK(back.rows[i].label == t.rows[i].label);
      CHECK(back.rows[i].split == t.rows[i].split);
      CHECK(back.rows[i].x == t.rows[i].x);
      CHECK(back.rows[i].values == t.rows[i].values);  // exact in binary
    }
  }
}

TEST_CASE("feature table rejects foreign files") {
  fs::path dir = fs::temp_directory_path() / "inkjet_test_features";
  fs::create_directories(dir);
  std::string path = (dir / "garbage.bin").string();
  {
    std::ofstream out(path, std::ios::binary);
    out << "this is not a feature file";
  }
  CHECK_THROWS_WITH_AS(load_feature_table(path), doctest::Contains("magic"),
                       std::runtime_error);
}
