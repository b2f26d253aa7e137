#pragma once

#include <string>

#include "inkjet/image.hpp"

namespace inkjet {

// PNG/TIFF reader, 8- or 16-bit; grayscale inputs are replicated to RGB,
// alpha is dropped.
RgbImage read_image(const std::string& path);

// Writes PNG (bit depth follows max_value).
void write_png(const std::string& path, const RgbImage& img);

}  // namespace inkjet
