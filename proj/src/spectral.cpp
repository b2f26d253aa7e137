#include "inkjet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace inkjet {

std::string to_string(SpectralMethod m) {
  switch (m) {
    case SpectralMethod::Fft: return "fft";
    case SpectralMethod::Stft: return "stft";
    default: return "dwt";
  }
}

std::string to_string(SpectralMode m) {
  return m == SpectralMode::Rowwise1d ? "rowwise_1d" : "full_2d";
}

SpectralMethod spectral_method_from_string(const std::string& s) {
  if (s == "fft") return SpectralMethod::Fft;
  if (s == "stft") return SpectralMethod::Stft;
  if (s == "dwt") return SpectralMethod::Dwt;
  throw std::invalid_argument("unknown spectral method: " + s);
}

SpectralMode spectral_mode_from_string(const std::string& s) {
  if (s == "rowwise_1d") return SpectralMode::Rowwise1d;
  if (s == "full_2d") return SpectralMode::Full2d;
  throw std::invalid_argument("unknown spectral mode: " + s);
}

void SpectralParams::validate() const {
  if (wavelet_order < 1 || wavelet_order > 4)
    throw std::invalid_argument("spectral: wavelet_order must be in [1, 4]");
  if (dwt_levels < 1) throw std::invalid_argument("spectral: dwt_levels must be >= 1");
  if (stft_window < 2) throw std::invalid_argument("spectral: stft_window must be >= 2");
  if (stft_hop < 1) throw std::invalid_argument("spectral: stft_hop must be >= 1");
}

// --- FFT ---------------------------------------------------------------

namespace {

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (!is_pow2(n)) throw std::invalid_argument("fft_inplace: size must be a power of two");
  // bit reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / double(len);
    for (size_t i = 0; i < n; i += len) {
      for (size_t j = 0; j < len / 2; ++j) {
        // direct twiddle evaluation keeps the error well under test tolerances
        std::complex<double> w(std::cos(ang * double(j)), std::sin(ang * double(j)));
        std::complex<double> u = a[i + j];
        std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= double(n);
}

namespace {

// chirp phase pi * t^2 / n with the quadratic reduced mod 2n first, so the
// argument stays small for exact trig
std::complex<double> chirp(uint64_t t, uint64_t n, double sign) {
  uint64_t q = (t * t) % (2 * n);
  double ang = sign * M_PI * double(q) / double(n);
  return {std::cos(ang), std::sin(ang)};
}

std::vector<std::complex<double>> bluestein(std::span<const double> x) {
  const size_t n = x.size();
  const size_t m = next_pow2(2 * n - 1);
  std::vector<std::complex<double>> a(m), b(m);
  for (size_t t = 0; t < n; ++t) a[t] = x[t] * chirp(t, n, -1.0);
  b[0] = chirp(0, n, 1.0);
  for (size_t t = 1; t < n; ++t) b[t] = b[m - t] = chirp(t, n, 1.0);
  fft_inplace(a, false);
  fft_inplace(b, false);
  for (size_t i = 0; i < m; ++i) a[i] *= b[i];
  fft_inplace(a, true);
  std::vector<std::complex<double>> out(n);
  for (size_t k = 0; k < n; ++k) out[k] = a[k] * chirp(k, n, -1.0);
  return out;
}

}  // namespace

std::vector<std::complex<double>> dft_1d(std::span<const double> signal) {
  const size_t n = signal.size();
  if (n == 0) throw std::invalid_argument("dft_1d: empty signal");
  if (n == 1) return {std::complex<double>(signal[0], 0.0)};
  if (is_pow2(n)) {
    std::vector<std::complex<double>> a(n);
    for (size_t t = 0; t < n; ++t) a[t] = signal[t];
    fft_inplace(a, false);
    return a;
  }
  return bluestein(signal);
}

// --- Wavelets ----------------------------------------------------------

WaveletFilter WaveletFilter::daubechies(int order) {
  // scaling filters, natural order; hi is the quadrature mirror
  static const std::vector<std::vector<double>> kLo = {
      // db1 (Haar)
      {0.7071067811865475244008443621, 0.7071067811865475244008443621},
      // db2
      {0.4829629131445341433748716, 0.8365163037378079055752937,
       0.2241438680420133810259727, -0.1294095225512603811744494},
      // db3
      {0.3326705529500826159985115, 0.8068915093110925764944936,
       0.4598775021184915700951519, -0.1350110200102545886963899,
       -0.0854412738820266616928191, 0.0352262918857095366027408},
      // db4
      {0.2303778133088965008632911, 0.7148465705529156470899219,
       0.6308807679298589078817163, -0.0279837694168598542369968,
       -0.1870348117190930840900849, 0.0308413818355607053645745,
       0.0328830116668851997190023, -0.0105974017850690321693509}};
  if (order < 1 || order > int(kLo.size()))
    throw std::invalid_argument("daubechies: order must be in [1, 4]");
  WaveletFilter f;
  f.order = order;
  f.lo = kLo[size_t(order - 1)];
  int taps = int(f.lo.size());
  f.hi.resize(size_t(taps));
  for (int k = 0; k < taps; ++k)
    f.hi[size_t(k)] = (k % 2 == 0 ? 1.0 : -1.0) * f.lo[size_t(taps - 1 - k)];
  return f;
}

namespace {

// half-point symmetric index fold: ... x1 x0 | x0 x1 ... xn-1 | xn-1 xn-2 ...
int sym_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -1 - i;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

}  // namespace

DwtStep dwt_step(std::span<const double> x, const WaveletFilter& f, BoundaryMode mode) {
  const int taps = f.taps();
  int n = int(x.size());
  if (n < taps)
    throw std::invalid_argument("dwt_step: signal shorter than filter support");

  DwtStep out;
  if (mode == BoundaryMode::Periodic) {
    // odd lengths are edge-padded to even first
    std::vector<double> padded;
    std::span<const double> sig = x;
    if (n % 2 != 0) {
      padded.assign(x.begin(), x.end());
      padded.push_back(x.back());
      sig = padded;
      n += 1;
    }
    const int half = n / 2;
    out.approx.resize(size_t(half));
    out.detail.resize(size_t(half));
    for (int i = 0; i < half; ++i) {
      double a = 0.0, d = 0.0;
      for (int j = 0; j < taps; ++j) {
        double v = sig[size_t((2 * i + j) % n)];
        a += f.lo[size_t(j)] * v;
        d += f.hi[size_t(j)] * v;
      }
      out.approx[size_t(i)] = a;
      out.detail[size_t(i)] = d;
    }
  } else {
    const int len = (n + taps - 1) / 2;
    out.approx.resize(size_t(len));
    out.detail.resize(size_t(len));
    // ext has taps-1 mirrored samples on each side; analysis reads
    // ext[2i + 1 + j] = x[sym_index(2i + 1 + j - (taps - 1))]
    for (int i = 0; i < len; ++i) {
      double a = 0.0, d = 0.0;
      for (int j = 0; j < taps; ++j) {
        double v = x[size_t(sym_index(2 * i + 2 + j - taps, n))];
        a += f.lo[size_t(j)] * v;
        d += f.hi[size_t(j)] * v;
      }
      out.approx[size_t(i)] = a;
      out.detail[size_t(i)] = d;
    }
  }
  return out;
}

std::vector<std::vector<double>> dwt_multilevel_1d(std::span<const double> signal,
                                                   int levels,
                                                   const WaveletFilter& f,
                                                   BoundaryMode mode) {
  if (levels < 1) throw std::invalid_argument("dwt_multilevel_1d: levels must be >= 1");
  std::vector<std::vector<double>> details;
  std::vector<double> approx(signal.begin(), signal.end());
  for (int l = 0; l < levels; ++l) {
    DwtStep step = dwt_step(approx, f, mode);
    details.push_back(std::move(step.detail));
    approx = std::move(step.approx);
  }
  std::vector<std::vector<double>> bands;
  bands.reserve(size_t(levels) + 1);
  bands.push_back(std::move(approx));  // coarsest approximation first
  for (int l = levels - 1; l >= 0; --l) bands.push_back(std::move(details[size_t(l)]));
  return bands;
}

// --- STFT --------------------------------------------------------------

std::vector<double> hann_window(int n) {
  std::vector<double> w(size_t(n), 0.0);
  for (int i = 0; i < n; ++i)
    w[size_t(i)] = 0.5 - 0.5 * std::cos(2.0 * M_PI * double(i) / double(n));
  return w;
}

std::vector<double> rect_window(int n) { return std::vector<double>(size_t(n), 1.0); }

StftGrid stft_1d(std::span<const double> signal, std::span<const double> window,
                 int hop) {
  const int w = int(window.size());
  const int t = int(signal.size());
  if (w > t) throw std::invalid_argument("stft_1d: window longer than signal");
  if (hop < 1) throw std::invalid_argument("stft_1d: hop must be >= 1");
  StftGrid grid;
  grid.bins = w;
  grid.frames = (t - w) / hop + 1;
  grid.mag.resize(size_t(grid.bins) * grid.frames);
  std::vector<double> chunk(size_t(w), 0.0);
  for (int n = 0; n < grid.frames; ++n) {
    for (int i = 0; i < w; ++i) chunk[size_t(i)] = window[size_t(i)] * signal[size_t(n * hop + i)];
    auto spec = dft_1d(chunk);
    for (int k = 0; k < w; ++k) grid.at(k, n) = std::abs(spec[size_t(k)]);
  }
  return grid;
}

// --- Band grouping -----------------------------------------------------

int fft_band_of_bin(int k, int t) {
  int folded = std::min(k, t - k);
  double f = double(folded) / double(t);  // normalized frequency in [0, 1/2]
  if (f <= 1.0 / 16.0) return 0;
  if (f <= 1.0 / 8.0) return 1;
  if (f <= 1.0 / 4.0) return 2;
  return 3;
}

namespace {

void check_square_crop(const Mat& plane) {
  if (plane.rows < 2 || plane.rows != plane.cols)
    throw std::invalid_argument("transform_2d: plane must be square");
}

std::vector<std::complex<double>> fft_2d(const Mat& plane) {
  const int rows = plane.rows, cols = plane.cols;
  if (!is_pow2(size_t(rows)) || !is_pow2(size_t(cols)))
    throw std::invalid_argument("fft_2d: dimensions must be powers of two");
  std::vector<std::complex<double>> a(size_t(rows) * cols);
  for (size_t i = 0; i < a.size(); ++i) a[i] = plane.v[i];
  std::vector<std::complex<double>> line;
  line.resize(size_t(cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) line[size_t(c)] = a[size_t(r) * cols + c];
    fft_inplace(line, false);
    for (int c = 0; c < cols; ++c) a[size_t(r) * cols + c] = line[size_t(c)];
  }
  line.resize(size_t(rows));
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) line[size_t(r)] = a[size_t(r) * cols + c];
    fft_inplace(line, false);
    for (int r = 0; r < rows; ++r) a[size_t(r) * cols + c] = line[size_t(r)];
  }
  return a;
}

int band_of_bin_2d(int r, int c, int rows, int cols) {
  double fr = double(std::min(r, rows - r)) / double(rows);
  double fc = double(std::min(c, cols - c)) / double(cols);
  double f = std::max(fr, fc);
  if (f <= 1.0 / 16.0) return 0;
  if (f <= 1.0 / 8.0) return 1;
  if (f <= 1.0 / 4.0) return 2;
  return 3;
}

void append_fft_2d_bands(const Mat& plane, std::vector<std::vector<double>>& bands) {
  auto spec = fft_2d(plane);
  const int rows = plane.rows, cols = plane.cols;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      bands[size_t(band_of_bin_2d(r, c, rows, cols))].push_back(
          std::abs(spec[size_t(r) * cols + c]));
}

}  // namespace

// separable step: columns then rows
Dwt2dLevel dwt_step_2d(const Mat& m, const WaveletFilter& f, BoundaryMode mode) {
  std::vector<double> line((size_t(m.rows)));
  // filter along columns
  Mat lo_part, hi_part;
  {
    std::vector<double> col((size_t(m.rows)));
    int out_len = 0;
    std::vector<std::vector<double>> lo_cols((size_t(m.cols)));
    std::vector<std::vector<double>> hi_cols((size_t(m.cols)));
    for (int c = 0; c < m.cols; ++c) {
      for (int r = 0; r < m.rows; ++r) col[size_t(r)] = m.at(r, c);
      DwtStep s = dwt_step(col, f, mode);
      out_len = int(s.approx.size());
      lo_cols[size_t(c)] = std::move(s.approx);
      hi_cols[size_t(c)] = std::move(s.detail);
    }
    lo_part = Mat(out_len, m.cols);
    hi_part = Mat(out_len, m.cols);
    for (int c = 0; c < m.cols; ++c)
      for (int r = 0; r < out_len; ++r) {
        lo_part.at(r, c) = lo_cols[size_t(c)][size_t(r)];
        hi_part.at(r, c) = hi_cols[size_t(c)][size_t(r)];
      }
  }
  // filter along rows of both halves
  auto split_rows = [&](const Mat& part, Mat& lo_out, Mat& hi_out) {
    std::vector<double> row((size_t(part.cols)));
    int out_len = 0;
    std::vector<std::vector<double>> lo_rows((size_t(part.rows)));
    std::vector<std::vector<double>> hi_rows((size_t(part.rows)));
    for (int r = 0; r < part.rows; ++r) {
      for (int c = 0; c < part.cols; ++c) row[size_t(c)] = part.at(r, c);
      DwtStep s = dwt_step(row, f, mode);
      out_len = int(s.approx.size());
      lo_rows[size_t(r)] = std::move(s.approx);
      hi_rows[size_t(r)] = std::move(s.detail);
    }
    lo_out = Mat(part.rows, out_len);
    hi_out = Mat(part.rows, out_len);
    for (int r = 0; r < part.rows; ++r)
      for (int c = 0; c < out_len; ++c) {
        lo_out.at(r, c) = lo_rows[size_t(r)][size_t(c)];
        hi_out.at(r, c) = hi_rows[size_t(r)][size_t(c)];
      }
  };
  Dwt2dLevel out;
  split_rows(lo_part, out.ll, out.lh);
  split_rows(hi_part, out.hl, out.hh);
  return out;
}

namespace {

void append_mat(std::vector<double>& band, const Mat& m) {
  band.insert(band.end(), m.v.begin(), m.v.end());
}

void append_dwt_2d_bands(const Mat& plane, const SpectralParams& params,
                         std::vector<std::vector<double>>& bands) {
  WaveletFilter f = WaveletFilter::daubechies(params.wavelet_order);
  Mat approx = plane;
  std::vector<Dwt2dLevel> levels;
  for (int l = 0; l < params.dwt_levels; ++l) {
    Dwt2dLevel lvl = dwt_step_2d(approx, f, params.boundary);
    approx = lvl.ll;
    levels.push_back(std::move(lvl));
  }
  // band 0: final approximation; bands 1..: {LH, HL, HH} per level,
  // coarsest first, mirroring the 1D [aL, dL, ..., d1] ordering
  append_mat(bands[0], approx);
  for (int l = params.dwt_levels - 1; l >= 0; --l) {
    int idx = params.dwt_levels - l;  // level L -> band 1, level 1 -> band L
    append_mat(bands[size_t(idx)], levels[size_t(l)].lh);
    append_mat(bands[size_t(idx)], levels[size_t(l)].hl);
    append_mat(bands[size_t(idx)], levels[size_t(l)].hh);
  }
}

void append_stft_2d_bands(const Mat& plane, const SpectralParams& params,
                          std::vector<std::vector<double>>& bands) {
  const int w = params.stft_window, hop = params.stft_hop;
  if (w > plane.rows || w > plane.cols)
    throw std::invalid_argument("transform_2d: stft window larger than plane");
  auto window = hann_window(w);
  Mat patch(w, w);
  for (int py = 0; py + w <= plane.rows; py += hop)
    for (int px = 0; px + w <= plane.cols; px += hop) {
      for (int r = 0; r < w; ++r)
        for (int c = 0; c < w; ++c)
          patch.at(r, c) = plane.at(py + r, px + c) * window[size_t(r)] * window[size_t(c)];
      auto spec = fft_2d(patch);
      for (int r = 0; r < w; ++r)
        for (int c = 0; c < w; ++c)
          bands[size_t(band_of_bin_2d(r, c, w, w))].push_back(
              std::abs(spec[size_t(r) * w + c]));
    }
}

}  // namespace

SubBandSet transform_2d(const Mat& plane, const SpectralParams& params) {
  params.validate();
  check_square_crop(plane);
  SubBandSet out;
  out.method = params.method;
  out.mode = SpectralMode::Full2d;
  out.bands.assign(kNumBands, {});
  switch (params.method) {
    case SpectralMethod::Fft: append_fft_2d_bands(plane, out.bands); break;
    case SpectralMethod::Dwt: append_dwt_2d_bands(plane, params, out.bands); break;
    case SpectralMethod::Stft: append_stft_2d_bands(plane, params, out.bands); break;
  }
  for (const auto& b : out.bands)
    if (b.empty()) throw std::runtime_error("transform_2d: produced an empty band");
  return out;
}

SubBandSet rowwise_linearize(const Mat& plane, const SpectralParams& params) {
  params.validate();
  if (plane.rows < 1 || plane.cols < 1)
    throw std::invalid_argument("rowwise_linearize: empty plane");
  SubBandSet out;
  out.method = params.method;
  out.mode = SpectralMode::Rowwise1d;
  out.bands.assign(kNumBands, {});
  const int t = plane.cols;
  WaveletFilter f = params.method == SpectralMethod::Dwt
                        ? WaveletFilter::daubechies(params.wavelet_order)
                        : WaveletFilter{};
  std::vector<double> row(size_t(t), 0.0);
  std::vector<double> window =
      params.method == SpectralMethod::Stft ? hann_window(params.stft_window)
                                            : std::vector<double>{};
  for (int r = 0; r < plane.rows; ++r) {
    std::copy_n(plane.row(r), t, row.begin());
    switch (params.method) {
      case SpectralMethod::Fft: {
        auto spec = dft_1d(row);
        for (int k = 0; k < t; ++k)
          out.bands[size_t(fft_band_of_bin(k, t))].push_back(std::abs(spec[size_t(k)]));
        break;
      }
      case SpectralMethod::Dwt: {
        auto bands = dwt_multilevel_1d(row, params.dwt_levels, f, params.boundary);
        // fold levels beyond kNumBands-1 details into the finest band
        out.bands[0].insert(out.bands[0].end(), bands[0].begin(), bands[0].end());
        for (size_t i = 1; i < bands.size(); ++i) {
          size_t idx = std::min(i, size_t(kNumBands - 1));
          out.bands[idx].insert(out.bands[idx].end(), bands[i].begin(), bands[i].end());
        }
        break;
      }
      case SpectralMethod::Stft: {
        StftGrid grid = stft_1d(row, window, params.stft_hop);
        for (int k = 0; k < grid.bins; ++k) {
          auto& band = out.bands[size_t(fft_band_of_bin(k, grid.bins))];
          for (int n = 0; n < grid.frames; ++n) band.push_back(grid.at(k, n));
        }
        break;
      }
    }
  }
  for (const auto& b : out.bands)
    if (b.empty()) throw std::runtime_error("rowwise_linearize: produced an empty band");
  return out;
}

SubBandSet analyze_plane(const Mat& plane, const SpectralParams& params) {
  return params.mode == SpectralMode::Full2d ? transform_2d(plane, params)
                                             : rowwise_linearize(plane, params);
}

// --- Band statistics ----------------------------------------------------

std::array<double, kBandStatCount> BandStats::as_array() const {
  return {entropy, p5,  p25,      p50,     p75, p95,
          mean,    variance, std_dev, rms, zero_crossings, mean_crossings};
}

const std::array<const char*, kBandStatCount>& BandStats::stat_names() {
  static const std::array<const char*, kBandStatCount> kNames = {
      "entropy", "p5",       "p25", "p50", "p75",        "p95",
      "mean",    "variance", "std", "rms", "zero_cross", "mean_cross"};
  return kNames;
}

BandStats band_stats(std::span<const double> band) {
  if (band.empty()) throw std::invalid_argument("band_stats: empty band");
  BandStats s;
  double energy = 0.0;
  for (double c : band) energy += c * c;
  if (energy > 0.0) {
    double h = 0.0;
    for (double c : band) {
      double p = c * c / energy;
      if (p > 0.0) h -= p * std::log(p);
    }
    s.entropy = h;
  }
  auto sorted = sorted_copy(band);
  s.p5 = percentile_sorted(sorted, 5.0);
  s.p25 = percentile_sorted(sorted, 25.0);
  s.p50 = percentile_sorted(sorted, 50.0);
  s.p75 = percentile_sorted(sorted, 75.0);
  s.p95 = percentile_sorted(sorted, 95.0);
  s.mean = mean_of(band);
  s.variance = variance_of(band, s.mean);
  s.std_dev = std::sqrt(s.variance);
  s.rms = std::sqrt(energy / double(band.size()));
  long zc = 0, mc = 0;
  for (size_t i = 0; i + 1 < band.size(); ++i) {
    if (band[i] * band[i + 1] < 0.0) ++zc;
    if ((band[i] - s.mean) * (band[i + 1] - s.mean) < 0.0) ++mc;
  }
  s.zero_crossings = double(zc);
  s.mean_crossings = double(mc);
  return s;
}

}  // namespace inkjet
