#include "inkjet/sampling.hpp"

#include <stdexcept>
#include <string>

#include "inkjet/preprocess.hpp"
#include "inkjet/util.hpp"

namespace inkjet {

Crop make_crop(const ScanDocument& doc, int x0, int y0) {
  const RgbImage& img = doc.image;
  if (x0 < 0 || y0 < 0 || x0 + kCropSize > img.width() || y0 + kCropSize > img.height())
    throw std::out_of_range("make_crop: origin out of range");
  Crop crop;
  crop.x0 = x0;
  crop.y0 = y0;
  crop.source_scan = doc.scan_id;
  crop.label = doc.printer_model;
  const Plane* sources[3] = {&img.r, &img.g, &img.b};
  for (int c = 0; c < 3; ++c) {
    Plane p(kCropSize, kCropSize, img.max_value());
    for (int y = 0; y < kCropSize; ++y)
      for (int x = 0; x < kCropSize; ++x) p.at(x, y) = sources[c]->at(x0 + x, y0 + y);
    crop.planes[size_t(c)] = std::move(p);
  }
  crop.planes[int(Channel::Gray)] =
      to_grayscale(crop.planes[0], crop.planes[1], crop.planes[2]);
  return crop;
}

std::vector<Crop> sample_crops(const ScanDocument& doc, int n, uint64_t rng_seed,
                               const SamplingParams& params) {
  if (n < 0) throw std::invalid_argument("sample_crops: n must be >= 0");
  const int max_x = doc.image.width() - kCropSize;
  const int max_y = doc.image.height() - kCropSize;
  if (max_x < 0 || max_y < 0)
    throw std::invalid_argument("sample_crops: scan '" + doc.scan_id +
                                "' is smaller than the crop size");
  std::vector<Crop> out;
  out.reserve(size_t(n));
  Rng rng(rng_seed);
  for (int slot = 0; slot < n; ++slot) {
    bool accepted = false;
    for (int attempt = 0; attempt < params.retry_budget; ++attempt) {
      int x0 = int(rng.uniform_int(0, max_x));
      int y0 = int(rng.uniform_int(0, max_y));
      Crop crop = make_crop(doc, x0, y0);
      InkMask mask =
          make_ink_mask(crop.plane(params.filter.channel), params.preprocess,
                        params.filter.channel);
      if (passes_filter(find_droplets(mask), params.filter)) {
        out.push_back(std::move(crop));
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::string found = out.empty()
                              ? "no valid crops found"
                              : "found only " + std::to_string(out.size()) + " of " +
                                    std::to_string(n) + " crops";
      throw std::runtime_error("sample_crops: retry budget exhausted on scan '" +
                               doc.scan_id + "': " + found);
    }
  }
  return out;
}

}  // namespace inkjet
