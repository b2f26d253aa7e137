#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>

#include "inkjet/imageio.hpp"
#include "inkjet/manifest.hpp"
#include "inkjet/sampling.hpp"
#include "inkjet/util.hpp"

using namespace inkjet;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("inkjet_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_dummy_png(const fs::path& path, int size = 8) {
  RgbImage img;
  img.r = Plane(size, size, 255, 255);
  img.g = Plane(size, size, 255, 255);
  img.b = Plane(size, size, 255, 255);
  write_png(path.string(), img);
}

// white page sprinkled with dark pixels so the droplet filter passes
ScanDocument noisy_document(int w, int h, uint64_t seed, double fill = 0.02) {
  Rng rng(seed);
  ScanDocument doc;
  doc.image.r = Plane(w, h, 255, 255);
  doc.image.g = Plane(w, h, 255, 255);
  doc.image.b = Plane(w, h, 255, 255);
  // 3x3 blobs: big enough to survive the median filter, like real droplets
  for (int y = 1; y + 1 < h; ++y)
    for (int x = 1; x + 1 < w; ++x)
      if (rng.uniform() < fill / 9.0)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            doc.image.r.at(x + dx, y + dy) = 30;
            doc.image.g.at(x + dx, y + dy) = 40;
            doc.image.b.at(x + dx, y + dy) = 50;
          }
  doc.scan_id = "noisy-" + std::to_string(seed);
  doc.printer_model = "test-printer";
  return doc;
}

}  // namespace

TEST_CASE("manifest: 25 models x 2 scans load as 25 train + 25 val") {
  fs::path dir = temp_dir("manifest50");
  write_dummy_png(dir / "img.png");
  std::ofstream out(dir / "manifest.jsonl");
  for (int m = 0; m < 25; ++m)
    for (int s = 0; s < 2; ++s)
      out << R"({"path":"img.png","printer_model":"model-)" << m
          << R"(","manufacturer":"mfr","scan_id":"m)" << m << "s" << s
          << R"(","split":")" << (s == 0 ? "train" : "val") << R"("})" << "\n";
  out.close();
  Manifest man = load_manifest((dir / "manifest.jsonl").string());
  CHECK(man.entries.size() == 50);
  CHECK(man.split_entries(Split::Train).size() == 25);
  CHECK(man.split_entries(Split::Val).size() == 25);
  CHECK(man.train_models().size() == 25);
}

TEST_CASE("manifest: empty file is a schema error") {
  fs::path dir = temp_dir("manifest_empty");
  std::ofstream(dir / "empty.jsonl").close();
  CHECK_THROWS_AS(load_manifest((dir / "empty.jsonl").string()), std::runtime_error);
}

TEST_CASE("manifest: val-only class is rejected by name") {
  fs::path dir = temp_dir("manifest_valonly");
  write_dummy_png(dir / "img.png");
  std::ofstream out(dir / "m.jsonl");
  out << R"({"path":"img.png","printer_model":"A","manufacturer":"m","scan_id":"s1","split":"train"})" << "\n";
  out << R"({"path":"img.png","printer_model":"X","manufacturer":"m","scan_id":"s2","split":"val"})" << "\n";
  out.close();
  try {
    load_manifest((dir / "m.jsonl").string());
    FAIL("expected validation error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("'X'") != std::string::npos);
  }
}

TEST_CASE("manifest: duplicate scan_id rejected") {
  fs::path dir = temp_dir("manifest_dup");
  write_dummy_png(dir / "img.png");
  std::ofstream out(dir / "m.jsonl");
  out << R"({"path":"img.png","printer_model":"A","manufacturer":"m","scan_id":"same","split":"train"})" << "\n";
  out << R"({"path":"img.png","printer_model":"A","manufacturer":"m","scan_id":"same","split":"val"})" << "\n";
  out.close();
  CHECK_THROWS_WITH_AS(load_manifest((dir / "m.jsonl").string()),
                       doctest::Contains("duplicate scan_id"), std::runtime_error);
}

TEST_CASE("manifest: unreadable image path rejected") {
  fs::path dir = temp_dir("manifest_missing");
  std::ofstream out(dir / "m.jsonl");
  out << R"({"path":"nope.png","printer_model":"A","manufacturer":"m","scan_id":"s1","split":"train"})" << "\n";
  out.close();
  CHECK_THROWS_WITH_AS(load_manifest((dir / "m.jsonl").string()),
                       doctest::Contains("unreadable"), std::runtime_error);
}

TEST_CASE("manifest: malformed JSON line reports the line number") {
  fs::path dir = temp_dir("manifest_badjson");
  std::ofstream out(dir / "m.jsonl");
  out << "not json\n";
  out.close();
  CHECK_THROWS_WITH_AS(load_manifest((dir / "m.jsonl").string()),
                       doctest::Contains(":1:"), std::runtime_error);
}

TEST_CASE("manifest round-trips through save") {
  fs::path dir = temp_dir("manifest_rt");
  write_dummy_png(dir / "img.png");
  Manifest m;
  m.base_dir = dir.string();
  for (int i = 0; i < 4; ++i) {
    ManifestEntry e;
    e.path = "img.png";
    e.printer_model = "P" + std::to_string(i % 2);
    e.manufacturer = "mfr";
    e.scan_id = "s" + std::to_string(i);
    e.split = i < 2 ? Split::Train : Split::Val;
    m.entries.push_back(e);
  }
  save_manifest(m, (dir / "rt.jsonl").string());
  Manifest loaded = load_manifest((dir / "rt.jsonl").string());
  REQUIRE(loaded.entries.size() == 4);
  CHECK(loaded.entries[2].scan_id == "s2");
  CHECK(loaded.entries[3].split == Split::Val);
}

TEST_CASE("sample_crops: zero crops is an empty list") {
  ScanDocument doc = noisy_document(300, 300, 1);
  CHECK(sample_crops(doc, 0, 0).empty());
}

TEST_CASE("sample_crops: deterministic per seed and uniform in bounds") {
  ScanDocument doc = noisy_document(400, 300, 2);
  auto a = sample_crops(doc, 12, 99);
  auto b = sample_crops(doc, 12, 99);
  REQUIRE(a.size() == 12);
  REQUIRE(b.size() == 12);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x0 == b[i].x0);
    CHECK(a[i].y0 == b[i].y0);
    CHECK(a[i].x0 >= 0);
    CHECK(a[i].x0 <= 400 - kCropSize);
    CHECK(a[i].y0 >= 0);
    CHECK(a[i].y0 <= 300 - kCropSize);
  }
  auto c = sample_crops(doc, 12, 100);
  bool any_diff = false;
  for (size_t i = 0; i < c.size(); ++i)
    if (c[i].x0 != a[i].x0 || c[i].y0 != a[i].y0) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("sample_crops: undersized scans are rejected") {
  ScanDocument doc = noisy_document(128, 128, 3);
  CHECK_THROWS_AS(sample_crops(doc, 1, 0), std::invalid_argument);
}

TEST_CASE("sample_crops: blank page exhausts the retry budget") {
  ScanDocument doc;
  doc.image.r = Plane(300, 300, 255, 255);
  doc.image.g = Plane(300, 300, 255, 255);
  doc.image.b = Plane(300, 300, 255, 255);
  doc.scan_id = "blank";
  CHECK_THROWS_WITH_AS(sample_crops(doc, 4, 0),
                       doctest::Contains("no valid crops found"), std::runtime_error);
}

TEST_CASE("crops carry the luminance gray plane") {
  ScanDocument doc = noisy_document(300, 300, 4);
  Crop crop = make_crop(doc, 10, 20);
  Plane expected = to_grayscale(crop.planes[0], crop.planes[1], crop.planes[2]);
  CHECK(crop.plane(Channel::Gray).data == expected.data);
  CHECK(crop.source_scan == doc.scan_id);
  CHECK(crop.label == doc.printer_model);
}

TEST_CASE("png i/o round-trips 8-bit rgb") {
  fs::path dir = temp_dir("imageio");
  Rng rng(5);
  RgbImage img;
  img.r = Plane(20, 14, 255);
  img.g = Plane(20, 14, 255);
  img.b = Plane(20, 14, 255);
  for (size_t i = 0; i < img.r.size(); ++i) {
    img.r.data[i] = uint16_t(rng.uniform_int(0, 255));
    img.g.data[i] = uint16_t(rng.uniform_int(0, 255));
    img.b.data[i] = uint16_t(rng.uniform_int(0, 255));
  }
  write_png((dir / "rt.png").string(), img);
  RgbImage back = read_image((dir / "rt.png").string());
  CHECK(back.r.data == img.r.data);
  CHECK(back.g.data == img.g.data);
  CHECK(back.b.data == img.b.data);
  CHECK_THROWS_AS(read_image((dir / "missing.png").string()), std::runtime_error);
}

TEST_CASE("png i/o round-trips 16-bit rgb") {
  fs::path dir = temp_dir("imageio16");
  Rng rng(6);
  RgbImage img;
  img.r = Plane(9, 7, 65535);
  img.g = Plane(9, 7, 65535);
  img.b = Plane(9, 7, 65535);
  for (size_t i = 0; i < img.r.size(); ++i) {
    img.r.data[i] = uint16_t(rng.uniform_int(0, 65535));
    img.g.data[i] = uint16_t(rng.uniform_int(0, 65535));
    img.b.data[i] = uint16_t(rng.uniform_int(0, 65535));
  }
  write_png((dir / "rt16.png").string(), img);
  RgbImage back = read_image((dir / "rt16.png").string());
  CHECK(back.r.max_value == 65535);
  CHECK(back.r.data == img.r.data);
  CHECK(back.b.data == img.b.data);
}
