#pragma once

#include <cstdint>
#include <vector>

#include "inkjet/droplet.hpp"
#include "inkjet/manifest.hpp"

namespace inkjet {

struct SamplingParams {
  CropFilter filter;
  PreprocessParams preprocess;  // used for the filter's ink mask
  int retry_budget = 20;        // attempts per crop slot
};

// Cuts one crop at (x0, y0); the gray plane is derived from the RGB planes.
Crop make_crop(const ScanDocument& doc, int x0, int y0);

// Draws n crops with origins uniform over the valid positions, re-drawing
// any crop that fails the droplet-count filter. Pure function of
// (doc, n, rng_seed, params); throws when a slot exhausts the retry budget,
// reporting how many crops were found.
std::vector<Crop> sample_crops(const ScanDocument& doc, int n, uint64_t rng_seed,
                               const SamplingParams& params = {});

}  // namespace inkjet
