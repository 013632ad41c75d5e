#include "iit/image.hpp"

#include <algorithm>
#include <cmath>

namespace iit {

RasterImage::RasterImage(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 0 || width < 0 || (channels != 1 && channels != 3))
    throw ShapeError("RasterImage: invalid dimensions");
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

RasterImage::RasterImage(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  if (height < 0 || width < 0 || (channels != 1 && channels != 3))
    throw ShapeError("RasterImage: invalid dimensions");
  if (data_.size() != static_cast<std::size_t>(height) * width * channels)
    throw ShapeError("RasterImage: data length does not match height*width*channels");
}

bool RasterImage::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

double RasterImage::min_value() const noexcept {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

double RasterImage::max_value() const noexcept {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

RasterImage RasterImage::plane(int channel) const {
  if (channel < 0 || channel >= channels_)
    throw ShapeError("plane: channel out of range");
  RasterImage out(height_, width_, 1);
  const std::size_t n = pixel_count();
  for (std::size_t i = 0; i < n; ++i)
    out.data_[i] = data_[i * channels_ + channel];
  out.hdr_ = hdr_;
  return out;
}

void RasterImage::set_plane(int channel, std::span<const double> plane_values) {
  if (channel < 0 || channel >= channels_)
    throw ShapeError("set_plane: channel out of range");
  if (plane_values.size() != pixel_count())
    throw ShapeError("set_plane: plane size mismatch");
  const std::size_t n = pixel_count();
  for (std::size_t i = 0; i < n; ++i)
    data_[i * channels_ + channel] = plane_values[i];
}

void require_finite(const RasterImage& img, const char* what) {
  if (!img.all_finite())
    throw ImageError(std::string(what) + ": image contains non-finite values");
}

void require_same_shape(const RasterImage& a, const RasterImage& b, const char* what) {
  if (a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels())
    throw ShapeError(std::string(what) + ": image shapes do not match");
}

RasterImage to_log_domain(const RasterImage& img, const LogDomainParams& p) {
  if (!(p.epsilon_floor > 0.0 && p.epsilon_floor < 1.0))
    throw ParamError("to_log_domain: epsilon_floor must lie in (0,1)");
  require_finite(img, "to_log_domain");
  RasterImage out(img.height(), img.width(), img.channels());
  auto src = img.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = std::log(std::max(src[i], p.epsilon_floor));
  return out;
}

RasterImage from_log_domain(const RasterImage& img) {
  require_finite(img, "from_log_domain");
  RasterImage out(img.height(), img.width(), img.channels());
  auto src = img.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = std::exp(src[i]);
  return out;
}

RasterImage rgb_to_luminance(const RasterImage& img) {
  if (img.channels() != 3)
    throw ShapeError("rgb_to_luminance: expected a 3-channel image");
  RasterImage out(img.height(), img.width(), 1);
  auto src = img.values();
  auto dst = out.values();
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double* px = &src[i * 3];
    dst[i] = 0.2126 * px[0] + 0.7152 * px[1] + 0.0722 * px[2];
  }
  out.mark_hdr(img.hdr());
  return out;
}

RasterImage layer_remap(const IntrinsicLayers& layers, const RemapParams& p) {
  require_same_shape(layers.illumination, layers.reflectance, "layer_remap");
  if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c_gain))
    throw ParamError("layer_remap: non-finite remap parameters");
  const RasterImage& L = layers.illumination;
  const RasterImage& R = layers.reflectance;
  RasterImage out(L.height(), L.width(), L.channels());
  auto l = L.values();
  auto r = R.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = std::exp(p.a + p.b * l[i] + p.c_gain * r[i]);
  return out;
}

}  // namespace iit
