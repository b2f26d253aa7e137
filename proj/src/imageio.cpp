#include "inkjet/imageio.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <stdexcept>

namespace inkjet {

RgbImage read_image(const std::string& path) {
  cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (m.empty()) throw std::runtime_error("imageio: cannot read image: " + path);
  if (m.depth() != CV_8U && m.depth() != CV_16U)
    throw std::runtime_error("imageio: unsupported bit depth (want 8/16-bit): " + path);

  const uint16_t maxv = m.depth() == CV_8U ? 255 : 65535;
  RgbImage out;
  out.r = Plane(m.cols, m.rows, maxv);
  out.g = Plane(m.cols, m.rows, maxv);
  out.b = Plane(m.cols, m.rows, maxv);

  auto fill = [&](auto fetch) {
    for (int y = 0; y < m.rows; ++y)
      for (int x = 0; x < m.cols; ++x) {
        auto [r, g, b] = fetch(y, x);
        out.r.at(x, y) = r;
        out.g.at(x, y) = g;
        out.b.at(x, y) = b;
      }
  };

  const int ch = m.channels();
  if (m.depth() == CV_8U) {
    if (ch == 1)
      fill([&](int y, int x) { uint16_t v = m.at<uint8_t>(y, x); return std::tuple{v, v, v}; });
    else if (ch == 3 || ch == 4)
      fill([&](int y, int x) {
        const uint8_t* p = m.ptr<uint8_t>(y) + size_t(x) * ch;  // BGR(A)
        return std::tuple<uint16_t, uint16_t, uint16_t>{p[2], p[1], p[0]};
      });
    else
      throw std::runtime_error("imageio: unsupported channel count: " + path);
  } else {
    if (ch == 1)
      fill([&](int y, int x) { uint16_t v = m.at<uint16_t>(y, x); return std::tuple{v, v, v}; });
    else if (ch == 3 || ch == 4)
      fill([&](int y, int x) {
        const uint16_t* p = m.ptr<uint16_t>(y) + size_t(x) * ch;
        return std::tuple{p[2], p[1], p[0]};
      });
    else
      throw std::runtime_error("imageio: unsupported channel count: " + path);
  }
  return out;
}

void write_png(const std::string& path, const RgbImage& img) {
  const bool wide = img.max_value() > 255;
  cv::Mat m(img.height(), img.width(), wide ? CV_16UC3 : CV_8UC3);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      if (wide) {
        auto& px = m.at<cv::Vec3w>(y, x);
        px = {img.b.at(x, y), img.g.at(x, y), img.r.at(x, y)};
      } else {
        auto& px = m.at<cv::Vec3b>(y, x);
        px = {uint8_t(img.b.at(x, y)), uint8_t(img.g.at(x, y)), uint8_t(img.r.at(x, y))};
      }
    }
  if (!cv::imwrite(path, m))
    throw std::runtime_error("imageio: cannot write image: " + path);
}

}  // namespace inkjet
