#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace inkjet {

// Deterministic RNG. std::mt19937_64 is bit-exact across platforms; the
// standard distributions are not, so the value mappings live here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // [0, 1)
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive range, rejection sampled (no modulo bias)
  int64_t uniform_int(int64_t lo, int64_t hi);

  double normal(double mean, double sigma);

  uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

uint64_t fnv1a64(const void* data, size_t len);
uint64_t fnv1a64(std::string_view s);

// Percentile with linear interpolation between closest ranks; `sorted` must
// be ascending and nonempty. q in [0, 100].
double percentile_sorted(std::span<const double> sorted, double q);

double mean_of(std::span<const double> xs);

// population variance (divisor n)
double variance_of(std::span<const double> xs, double mean);

std::vector<double> sorted_copy(std::span<const double> xs);

// Row-major dense matrix of doubles; shared by the spectral code and the MLP.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), v(size_t(r) * c, 0.0) {}

  double& at(int r, int c) { return v[size_t(r) * cols + c]; }
  double at(int r, int c) const { return v[size_t(r) * cols + c]; }
  double* row(int r) { return v.data() + size_t(r) * cols; }
  const double* row(int r) const { return v.data() + size_t(r) * cols; }
  size_t size() const { return v.size(); }
};

}  // namespace inkjet
