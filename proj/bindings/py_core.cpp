// Python bindings for the core operations: grayscale/ink-mask preprocessing,
// the three spectral transforms, droplet statistics, feature extraction, the
// synthetic generator, metrics and trained-model inference.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "inkjet/config.hpp"
#include "inkjet/droplet.hpp"
#include "inkjet/featurize.hpp"
#include "inkjet/model.hpp"
#include "inkjet/pipeline.hpp"
#include "inkjet/spectral.hpp"
#include "inkjet/synthgen.hpp"

namespace py = pybind11;
using namespace inkjet;

namespace {

Plane plane_from_array(const py::array& arr, uint16_t max_value) {
  auto buf = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(arr);
  if (!buf || buf.ndim() != 2) throw std::invalid_argument("expected a 2D array");
  Plane p(int(buf.shape(1)), int(buf.shape(0)), max_value);
  auto r = buf.unchecked<2>();
  for (py::ssize_t y = 0; y < buf.shape(0); ++y)
    for (py::ssize_t x = 0; x < buf.shape(1); ++x) {
      double v = r(y, x);
      p.at(int(x), int(y)) = uint16_t(std::lround(std::clamp(v, 0.0, double(max_value))));
    }
  return p;
}

uint16_t max_value_of(const py::array& arr) {
  return arr.dtype().is(py::dtype::of<uint16_t>()) ? 65535 : 255;
}

Crop crop_from_array(const py::array& rgb) {
  auto buf = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(rgb);
  if (!buf || buf.ndim() != 3 || buf.shape(2) != 3)
    throw std::invalid_argument("expected an HxWx3 array");
  if (buf.shape(0) != kCropSize || buf.shape(1) != kCropSize)
    throw std::invalid_argument("crop must be 256x256");
  const uint16_t maxv = max_value_of(rgb);
  auto r = buf.unchecked<3>();
  Crop crop;
  for (int c = 0; c < 3; ++c) {
    Plane p(kCropSize, kCropSize, maxv);
    for (int y = 0; y < kCropSize; ++y)
      for (int x = 0; x < kCropSize; ++x)
        p.at(x, y) = uint16_t(std::lround(std::clamp(r(y, x, c), 0.0, double(maxv))));
    crop.planes[size_t(c)] = std::move(p);
  }
  crop.planes[int(Channel::Gray)] =
      to_grayscale(crop.planes[0], crop.planes[1], crop.planes[2]);
  return crop;
}

py::array_t<double> vector_to_array(const std::vector<double>& v) {
  py::array_t<double> out(py::ssize_t(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

PipelineConfig config_from_json_str(const std::string& config_json) {
  if (config_json.empty()) return PipelineConfig{};
  return PipelineConfig::from_json(nlohmann::json::parse(config_json));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "inkjet printer identification core (droplet + frequency features)";

  m.attr("LAYOUT_VERSION") = kLayoutVersion;
  m.attr("NUM_FEATURES") = kNumFeatures;
  m.attr("CROP_SIZE") = kCropSize;

  m.def("feature_names", [] { return feature_names(); },
        "Names of the 241 features in layout order.");

  m.def(
      "subset_indices",
      [](const std::string& mode) { return subset_indices(feature_subset_from_string(mode)); },
      py::arg("mode"), "Kept indices for 'all', 'single_channel' or 'frequency_only'.");

  m.def(
      "to_grayscale",
      [](const py::array& rgb) {
        auto buf =
            py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(rgb);
        if (!buf || buf.ndim() != 3 || buf.shape(2) != 3)
          throw std::invalid_argument("expected an HxWx3 array");
        const uint16_t maxv = max_value_of(rgb);
        auto r = buf.unchecked<3>();
        const int h = int(buf.shape(0)), w = int(buf.shape(1));
        Plane pr(w, h, maxv), pg(w, h, maxv), pb(w, h, maxv);
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x) {
            pr.at(x, y) = uint16_t(r(y, x, 0));
            pg.at(x, y) = uint16_t(r(y, x, 1));
            pb.at(x, y) = uint16_t(r(y, x, 2));
          }
        Plane gray = to_grayscale(pr, pg, pb);
        py::array_t<double> out({h, w});
        auto o = out.mutable_unchecked<2>();
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x) o(y, x) = gray.at(x, y);
        return out;
      },
      py::arg("rgb"), "Rec.601 luminance of an HxWx3 image.");

  m.def(
      "dft_1d",
      [](const py::array_t<double>& x) {
        std::vector<double> signal(x.data(), x.data() + x.size());
        auto spec = dft_1d(signal);
        py::array_t<std::complex<double>> out(py::ssize_t(spec.size()));
        std::copy(spec.begin(), spec.end(), out.mutable_data());
        return out;
      },
      py::arg("signal"), "Discrete Fourier transform (unnormalized).");

  m.def(
      "dwt_multilevel_1d",
      [](const py::array_t<double>& x, int levels, int order, const std::string& boundary) {
        std::vector<double> signal(x.data(), x.data() + x.size());
        BoundaryMode mode = boundary == "periodic" ? BoundaryMode::Periodic
                                                   : BoundaryMode::Symmetric;
        auto bands = dwt_multilevel_1d(signal, levels, WaveletFilter::daubechies(order), mode);
        py::list out;
        for (const auto& band : bands) out.append(vector_to_array(band));
        return out;
      },
      py::arg("signal"), py::arg("levels") = 3, py::arg("order") = 4,
      py::arg("boundary") = "symmetric",
      "Multilevel Daubechies decomposition, bands [approx_L, detail_L..detail_1].");

  m.def(
      "stft_1d",
      [](const py::array_t<double>& x, int window, int hop, bool hann) {
        std::vector<double> signal(x.data(), x.data() + x.size());
        auto w = hann ? hann_window(window) : rect_window(window);
        StftGrid grid = stft_1d(signal, w, hop);
        py::array_t<double> out({grid.bins, grid.frames});
        std::copy(grid.mag.begin(), grid.mag.end(), out.mutable_data());
        return out;
      },
      py::arg("signal"), py::arg("window") = 64, py::arg("hop") = 32,
      py::arg("hann") = true, "Magnitude spectrogram, rows = bins, cols = frames.");

  m.def(
      "band_stats",
      [](const py::array_t<double>& band) {
        std::vector<double> b(band.data(), band.data() + band.size());
        BandStats s = band_stats(b);
        py::dict out;
        auto values = s.as_array();
        const auto& names = BandStats::stat_names();
        for (int i = 0; i < kBandStatCount; ++i) out[names[size_t(i)]] = values[size_t(i)];
        return out;
      },
      py::arg("band"), "The 12 per-band statistics as a dict.");

  m.def(
      "make_ink_mask",
      [](const py::array& plane, double sharpen_sigma, double sharpen_amount,
         int denoise_window, const std::string& threshold_mode, int fixed_threshold) {
        PreprocessParams params;
        params.sharpen_sigma = sharpen_sigma;
        params.sharpen_amount = sharpen_amount;
        params.denoise_window = denoise_window;
        params.threshold_mode =
            threshold_mode == "fixed" ? ThresholdMode::Fixed : ThresholdMode::Otsu;
        params.fixed_threshold = uint16_t(fixed_threshold);
        InkMask mask = make_ink_mask(plane_from_array(plane, max_value_of(plane)), params);
        py::array_t<bool> out({mask.height, mask.width});
        auto o = out.mutable_unchecked<2>();
        for (int y = 0; y < mask.height; ++y)
          for (int x = 0; x < mask.width; ++x) o(y, x) = mask.at(x, y) != 0;
        return out;
      },
      py::arg("plane"), py::arg("sharpen_sigma") = 1.0, py::arg("sharpen_amount") = 1.0,
      py::arg("denoise_window") = 3, py::arg("threshold_mode") = "otsu",
      py::arg("fixed_threshold") = 128,
      "sharpen -> denoise -> threshold; True marks ink pixels.");

  m.def(
      "find_droplets",
      [](const py::array_t<bool>& mask) {
        auto r = mask.unchecked<2>();
        InkMask m(int(mask.shape(1)), int(mask.shape(0)), Channel::Gray);
        for (int y = 0; y < m.height; ++y)
          for (int x = 0; x < m.width; ++x) m.at(x, y) = r(y, x) ? 1 : 0;
        auto drops = find_droplets(m);
        py::array_t<double> out({py::ssize_t(drops.size()), py::ssize_t(4)});
        auto o = out.mutable_unchecked<2>();
        for (size_t i = 0; i < drops.size(); ++i) {
          o(py::ssize_t(i), 0) = double(drops[i].area);
          o(py::ssize_t(i), 1) = double(drops[i].perimeter);
          o(py::ssize_t(i), 2) = drops[i].centroid_x;
          o(py::ssize_t(i), 3) = drops[i].centroid_y;
        }
        return out;
      },
      py::arg("mask"),
      "8-connected components: one row (area, perimeter, cx, cy) per droplet.");

  m.def(
      "extract_features",
      [](const py::array& crop_rgb, const std::string& config_json) {
        PipelineConfig config = config_from_json_str(config_json);
        FeatureParams params{config.spectral, config.preprocess};
        return vector_to_array(extract_features(crop_from_array(crop_rgb), params));
      },
      py::arg("crop_rgb"), py::arg("config_json") = "",
      "The 241-dimensional descriptor of a 256x256 RGB crop.");

  m.def(
      "render_synthetic",
      [](int width, int height, double dpi, double pitch_um, double radius_um,
         double radius_std_um, double jitter_um, double satellite_prob, uint64_t seed,
         const std::vector<double>& densities) {
        PrinterProfile p;
        p.name = "py";
        p.row_pitch_um = pitch_um;
        p.radius_mean_um = radius_um;
        p.radius_std_um = radius_std_um;
        p.placement_jitter_um = jitter_um;
        p.satellite_prob = satellite_prob;
        p.seed = seed;
        static const uint8_t tints[3][3] = {{60, 200, 235}, {230, 60, 190}, {245, 235, 50}};
        for (size_t i = 0; i < densities.size(); ++i) {
          const auto& t = tints[i % 3];
          p.inks.push_back({densities[i], t[0], t[1], t[2]});
        }
        RgbImage img = render_document(p, width, height, dpi);
        py::array_t<uint8_t> out({height, width, 3});
        auto o = out.mutable_unchecked<3>();
        for (int y = 0; y < height; ++y)
          for (int x = 0; x < width; ++x) {
            o(y, x, 0) = uint8_t(img.r.at(x, y));
            o(y, x, 1) = uint8_t(img.g.at(x, y));
            o(y, x, 2) = uint8_t(img.b.at(x, y));
          }
        return out;
      },
      py::arg("width") = 512, py::arg("height") = 512, py::arg("dpi") = 2400.0,
      py::arg("pitch_um") = 140.0, py::arg("radius_um") = 25.0,
      py::arg("radius_std_um") = 4.0, py::arg("jitter_um") = 10.0,
      py::arg("satellite_prob") = 0.1, py::arg("seed") = 0,
      py::arg("densities") = std::vector<double>{35.0, 25.0, 18.0},
      "Render a synthetic droplet page as an HxWx3 uint8 array.");

  m.def(
      "top_n_f1",
      [](const py::array_t<double>& logits, const std::vector<int>& labels, int n) {
        auto r = logits.unchecked<2>();
        std::vector<std::vector<double>> rows(size_t(r.shape(0)));
        for (py::ssize_t i = 0; i < r.shape(0); ++i) {
          rows[size_t(i)].resize(size_t(r.shape(1)));
          for (py::ssize_t c = 0; c < r.shape(1); ++c) rows[size_t(i)][size_t(c)] = r(i, c);
        }
        return top_n_f1(rows, labels, n, int(r.shape(1)));
      },
      py::arg("logits"), py::arg("labels"), py::arg("n") = 1,
      "Macro Top-N F1 of an [samples x classes] logit matrix.");

  py::class_<MlpModel>(m, "Model")
      .def_static("load", &load_checkpoint, py::arg("path"),
                  "Load a trained checkpoint.")
      .def_property_readonly("labels", [](const MlpModel& m_) { return m_.labels; })
      .def_property_readonly("input_dim", &MlpModel::input_dim)
      .def_property_readonly("num_classes", &MlpModel::num_classes)
      .def(
          "predict_logits",
          [](const MlpModel& model, const py::array_t<double>& features) {
            if (features.ndim() != 1)
              throw std::invalid_argument("expected a 1D feature vector");
            std::vector<double> full(features.data(), features.data() + features.size());
            return vector_to_array(model.forward(model.prepare_input(full)));
          },
          py::arg("features"),
          "Logits for one raw 241-feature vector (standardization applied).");
}
