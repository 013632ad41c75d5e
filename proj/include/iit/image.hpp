#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "iit/errors.hpp"

namespace iit {

// Row-major, channel-interleaved raster of real intensities. Display-referred
// images live in [0,1]; HDR radiance is unbounded positive. Pixel index
// i = row * width + col; solver modules treat channels as independent planes.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int height, int width, int channels, double fill = 0.0);
  RasterImage(int height, int width, int channels, std::vector<double> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t value_count() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int row, int col, int channel = 0) noexcept {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + channel];
  }
  double at(int row, int col, int channel = 0) const noexcept {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + channel];
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  // Radiance images carry unbounded positive values and skip [0,1] checks.
  bool hdr() const noexcept { return hdr_; }
  void mark_hdr(bool on = true) noexcept { hdr_ = on; }

  bool all_finite() const noexcept;
  double min_value() const noexcept;
  double max_value() const noexcept;

  RasterImage plane(int channel) const;
  void set_plane(int channel, std::span<const double> plane_values);

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  bool hdr_ = false;
  std::vector<double> data_;
};

// Additive layer split in the log domain: log image = illumination + reflectance.
struct IntrinsicLayers {
  RasterImage illumination;
  RasterImage reflectance;
};

// Global remap applied to the log-domain layers: a + b*L + c_gain*R.
struct RemapParams {
  double a = 0.0;
  double b = 1.0;
  double c_gain = 1.0;
};

struct LogDomainParams {
  // Intensity floor applied before the log; one display quantization step.
  double epsilon_floor = 1.0 / 255.0;
};

RasterImage to_log_domain(const RasterImage& img, const LogDomainParams& p);
RasterImage from_log_domain(const RasterImage& img);

// Rec. 709 luma weights on linear intensities.
RasterImage rgb_to_luminance(const RasterImage& img);

// Remaps layers in the log domain and returns the exponentiated result
// (no clamping; callers clamp for display).
RasterImage layer_remap(const IntrinsicLayers& layers, const RemapParams& p);

void require_finite(const RasterImage& img, const char* what);
void require_same_shape(const RasterImage& a, const RasterImage& b, const char* what);

}  // namespace iit
