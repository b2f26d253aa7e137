#include <doctest.h>

#include <stdexcept>

#include <algorithm>

#include "inkjet/droplet.hpp"
#include "inkjet/util.hpp"
#include "oracles.hpp"

using namespace inkjet;

namespace {

InkMask random_mask(int w, int h, double fill, Rng& rng) {
  InkMask m(w, h, Channel::Gray);
  for (auto& v : m.mask) v = rng.uniform() < fill ? 1 : 0;
  return m;
}

}  // namespace

TEST_CASE("single ink pixel") {
  InkMask m(8, 8, Channel::Gray);
  m.at(3, 4) = 1;
  auto drops = find_droplets(m);
  REQUIRE(drops.size() == 1);
  CHECK(drops[0].area == 1);
  CHECK(drops[0].perimeter == 4);
  CHECK(drops[0].centroid_x == doctest::Approx(3.0));
  CHECK(drops[0].centroid_y == doctest::Approx(4.0));
}

TEST_CASE("2x2 ink square") {
  InkMask m(8, 8, Channel::Gray);
  for (int y = 2; y < 4; ++y)
    for (int x = 5; x < 7; ++x) m.at(x, y) = 1;
  auto drops = find_droplets(m);
  REQUIRE(drops.size() == 1);
  CHECK(drops[0].area == 4);
  CHECK(drops[0].perimeter == 8);
}

TEST_CASE("diagonal pixels join under 8-connectivity") {
  InkMask m(4, 4, Channel::Gray);
  m.at(0, 0) = 1;
  m.at(1, 1) = 1;
  auto drops = find_droplets(m);
  REQUIRE(drops.size() == 1);
  CHECK(drops[0].area == 2);
  CHECK(drops[0].perimeter == 8);
}

TEST_CASE("empty mask yields no droplets and zero stats") {
  InkMask m(8, 8, Channel::Gray);
  auto drops = find_droplets(m);
  CHECK(drops.empty());
  DropletStats s = droplet_stats(drops);
  CHECK(s.droplet_count == 0);
  for (double v : s.as_array()) CHECK(v == 0.0);
}

TEST_CASE("random masks match the flood-fill oracle exactly") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    int w = int(rng.uniform_int(1, 48));
    int h = int(rng.uniform_int(1, 48));
    InkMask m = random_mask(w, h, rng.uniform(0.05, 0.6), rng);
    auto drops = find_droplets(m);
    auto expected = oracle::flood_fill_components(m);
    REQUIRE(drops.size() == expected.size());
    // discovery order differs; compare as sorted multisets
    std::vector<std::pair<long, long>> a, b;
    long ink_pixels = 0;
    for (uint8_t v : m.mask) ink_pixels += v;
    long area_sum = 0;
    for (const auto& d : drops) {
      a.emplace_back(d.area, d.perimeter);
      area_sum += d.area;
      CHECK(d.perimeter >= 4);
      CHECK(d.area >= 1);
    }
    CHECK(area_sum == ink_pixels);  // components partition the ink pixels
    for (const auto& c : expected) b.emplace_back(c.area, c.perimeter);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("droplets are translation invariant") {
  Rng rng(103);
  InkMask m(32, 32, Channel::Gray);
  for (int y = 4; y < 12; ++y)
    for (int x = 4; x < 12; ++x) m.at(x, y) = rng.uniform() < 0.5 ? 1 : 0;
  InkMask shifted(32, 32, Channel::Gray);
  for (int y = 4; y < 12; ++y)
    for (int x = 4; x < 12; ++x) shifted.at(x + 13, y + 9) = m.at(x, y);
  auto a = find_droplets(m);
  auto b = find_droplets(shifted);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].area == b[i].area);
    CHECK(a[i].perimeter == b[i].perimeter);
  }
}

TEST_CASE("component ordering is row-major by first pixel") {
  InkMask m(8, 8, Channel::Gray);
  m.at(6, 0) = 1;  // first row, later column
  m.at(1, 3) = 1;
  auto drops = find_droplets(m);
  REQUIRE(drops.size() == 2);
  CHECK(drops[0].centroid_y == doctest::Approx(0.0));
  CHECK(drops[1].centroid_y == doctest::Approx(3.0));
}

TEST_CASE("droplet_stats of a single droplet") {
  DropletStats s = droplet_stats({Droplet{5, 12, 0.0, 0.0}});
  CHECK(s.area_mean == 5.0);
  CHECK(s.area_std == 0.0);
  CHECK(s.area_p25 == 5.0);
  CHECK(s.area_p50 == 5.0);
  CHECK(s.area_p75 == 5.0);
  CHECK(s.perim_mean == 12.0);
  CHECK(s.perim_p75 == 12.0);
  CHECK(s.droplet_count == 1);
}

TEST_CASE("droplet_stats matches naive two-pass recomputation") {
  Rng rng(107);
  std::vector<Droplet> drops;
  for (int i = 0; i < 100; ++i)
    drops.push_back({rng.uniform_int(1, 500), rng.uniform_int(4, 200), 0.0, 0.0});
  DropletStats s = droplet_stats(drops);

  std::vector<double> areas;
  for (const auto& d : drops) areas.push_back(double(d.area));
  double mean = 0.0;
  for (double a : areas) mean += a;
  mean /= double(areas.size());
  double var = 0.0;
  for (double a : areas) var += (a - mean) * (a - mean);
  var /= double(areas.size());
  CHECK(s.area_mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(s.area_std == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  CHECK(s.area_p25 <= s.area_p50);
  CHECK(s.area_p50 <= s.area_p75);
}

TEST_CASE("passes_filter boundary is inclusive") {
  std::vector<Droplet> nine(9), ten(10);
  CropFilter f;  // min 10
  CHECK_FALSE(passes_filter({}, f));
  CHECK_FALSE(passes_filter(nine, f));
  CHECK(passes_filter(ten, f));
}
