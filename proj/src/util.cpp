#include "inkjet/util.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace inkjet {

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  uint64_t span = uint64_t(hi - lo) + 1;
  if (span == 0) return int64_t(engine_());  // full 64-bit range
  uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + int64_t(x % span);
}

double Rng::normal(double mean, double sigma) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + sigma * spare_;
  }
  double u1, u2;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return mean + sigma * r * std::cos(a);
}

uint64_t fnv1a64(const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ull;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("percentile of empty range");
  if (sorted.size() == 1) return sorted[0];
  double rank = q / 100.0 * double(sorted.size() - 1);
  size_t lo = size_t(rank);
  if (lo >= sorted.size() - 1) return sorted.back();
  double frac = rank - double(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / double(xs.size());
}

double variance_of(std::span<const double> xs, double mean) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return s / double(xs.size());
}

std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> out(xs.begin(), xs.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace inkjet
