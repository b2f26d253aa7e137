#pragma once

// Independent reference implementations used only by tests. These stay
// deliberately naive (direct sums, flood fill, two-pass statistics) so they
// share no code path with the library.

#include <complex>
#include <span>
#include <vector>

#include "inkjet/preprocess.hpp"
#include "inkjet/spectral.hpp"

namespace inkjet::oracle {

// direct O(T^2) evaluation of X(k) = sum_t x(t) e^{-i 2 pi k t / T}
std::vector<std::complex<double>> brute_dft(std::span<const double> x);

// transpose/adjoint reconstruction of one analysis step; target_len is the
// length of the signal that produced (approx, detail)
std::vector<double> inverse_dwt_step(const std::vector<double>& approx,
                                     const std::vector<double>& detail,
                                     const WaveletFilter& f, BoundaryMode mode,
                                     int target_len);

// full multilevel inverse; `lengths` holds the per-level input lengths
// recorded top-down (lengths[0] = original signal length)
std::vector<double> inverse_dwt_multilevel(const std::vector<std::vector<double>>& bands,
                                           const WaveletFilter& f, BoundaryMode mode,
                                           const std::vector<int>& lengths);

struct ComponentStats {
  long area = 0;
  long perimeter = 0;
};

// independent 8-connectivity labeling (iterative DFS over a visited grid)
// plus per-pixel edge counting
std::vector<ComponentStats> flood_fill_components(const InkMask& mask);

}  // namespace inkjet::oracle
