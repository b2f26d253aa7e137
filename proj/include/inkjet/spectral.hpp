#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "inkjet/util.hpp"

namespace inkjet {

enum class SpectralMethod { Fft, Stft, Dwt };
enum class SpectralMode { Rowwise1d, Full2d };
enum class BoundaryMode { Symmetric, Periodic };

std::string to_string(SpectralMethod m);
std::string to_string(SpectralMode m);
SpectralMethod spectral_method_from_string(const std::string& s);
SpectralMode spectral_mode_from_string(const std::string& s);

struct SpectralParams {
  SpectralMethod method = SpectralMethod::Dwt;
  SpectralMode mode = SpectralMode::Rowwise1d;
  int wavelet_order = 4;  // Daubechies order (2*order taps)
  int dwt_levels = 3;
  BoundaryMode boundary = BoundaryMode::Symmetric;
  int stft_window = 64;  // Hann window length
  int stft_hop = 32;

  void validate() const;
};

// number of frequency sub-bands every transform is reduced to
inline constexpr int kNumBands = 4;

// Coefficient groups ordered from the lowest band (approximation) to the
// highest detail band. Magnitudes for the complex transforms, signed
// coefficients for the DWT.
struct SubBandSet {
  std::vector<std::vector<double>> bands;
  SpectralMethod method = SpectralMethod::Dwt;
  SpectralMode mode = SpectralMode::Rowwise1d;
};

// --- Fourier ---------------------------------------------------------------

// X(k) = sum_t x(t) e^{-i 2 pi k t / T}. Radix-2 for power-of-two lengths,
// Bluestein otherwise; both match the direct sum.
std::vector<std::complex<double>> dft_1d(std::span<const double> signal);

// in-place complex FFT core (size must be a power of two unless forced
// through Bluestein by dft_1d)
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

// --- Wavelets --------------------------------------------------------------

struct WaveletFilter {
  int order = 4;
  std::vector<double> lo;  // decomposition low-pass
  std::vector<double> hi;  // decomposition high-pass (QMF of lo)

  static WaveletFilter daubechies(int order);  // order in [1, 4]
  int taps() const { return int(lo.size()); }
};

// One analysis step: convolve with the extended signal, downsample by two.
// Output length: floor((n + taps - 1) / 2) for Symmetric, ceil(n / 2) for
// Periodic (odd n is edge-padded to even first).
struct DwtStep {
  std::vector<double> approx;
  std::vector<double> detail;
};
DwtStep dwt_step(std::span<const double> x, const WaveletFilter& f, BoundaryMode mode);

// Cascaded decomposition; bands ordered [approx_L, detail_L, ..., detail_1].
std::vector<std::vector<double>> dwt_multilevel_1d(std::span<const double> signal,
                                                   int levels,
                                                   const WaveletFilter& f,
                                                   BoundaryMode mode);

// One separable 2D analysis step (columns then rows).
struct Dwt2dLevel {
  Mat ll, lh, hl, hh;
};
Dwt2dLevel dwt_step_2d(const Mat& m, const WaveletFilter& f, BoundaryMode mode);

// --- STFT ------------------------------------------------------------------

std::vector<double> hann_window(int n);
std::vector<double> rect_window(int n);

// Magnitude grid, rows = frequency bins (window length), cols = frames at
// hop spacing; only full windows are taken.
struct StftGrid {
  int bins = 0;
  int frames = 0;
  std::vector<double> mag;  // row-major [bins x frames]

  double at(int k, int n) const { return mag[size_t(k) * frames + n]; }
  double& at(int k, int n) { return mag[size_t(k) * frames + n]; }
};
StftGrid stft_1d(std::span<const double> signal, std::span<const double> window,
                 int hop);

// --- Crop-level reductions -------------------------------------------------

// 2D transform of a square plane grouped into kNumBands bands.
SubBandSet transform_2d(const Mat& plane, const SpectralParams& params);

// 1D transform applied per pixel row; per-band coefficients concatenated in
// row order.
SubBandSet rowwise_linearize(const Mat& plane, const SpectralParams& params);

SubBandSet analyze_plane(const Mat& plane, const SpectralParams& params);

// dyadic octave index (0 = lowest .. kNumBands-1) for a 1D spectrum bin,
// mirroring 3-level wavelet octaves
int fft_band_of_bin(int k, int t);

// --- Per-band statistics ---------------------------------------------------

inline constexpr int kBandStatCount = 12;

struct BandStats {
  double entropy = 0.0;  // nats, p_i = c_i^2 / sum c^2
  double p5 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p95 = 0.0;
  double mean = 0.0;
  double variance = 0.0;  // population
  double std_dev = 0.0;
  double rms = 0.0;
  double zero_crossings = 0.0;  // strict sign changes between neighbours
  double mean_crossings = 0.0;  // same after subtracting the band mean

  std::array<double, kBandStatCount> as_array() const;
  static const std::array<const char*, kBandStatCount>& stat_names();
};

BandStats band_stats(std::span<const double> band);

}  // namespace inkjet
