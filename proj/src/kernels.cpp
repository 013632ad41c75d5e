#include "iit/kernels.hpp"

#include <cmath>
#include <ostream>
#include <vector>

namespace iit {

namespace {

void validate_kernel_params(const KernelParams& p) {
  if (p.window < 3 || p.window % 2 == 0)
    throw ParamError("kernel window must be odd and >= 3");
  if (!(p.sigma_s > 0.0)) throw ParamError("sigma_s must be positive");
  if (p.sigma_r && !(*p.sigma_r > 0.0)) throw ParamError("sigma_r must be positive");
}

// Shared window walk; `range2` returns the squared range distance between
// the center pixel and a neighbor, or 0 for the pure spatial kernel.
template <typename RangeFn>
AffinityMatrix build_affinity(int height, int width, const KernelParams& p,
                              RangeFn&& range2) {
  if (height < 1 || width < 1)
    throw ShapeError("affinity: image must have at least one pixel");
  const int half = p.window / 2;
  const double inv_ss = 1.0 / (p.sigma_s * p.sigma_s);
  const double inv_sr = p.sigma_r ? 1.0 / (*p.sigma_r * *p.sigma_r) : 0.0;

  const std::size_t n = static_cast<std::size_t>(height) * width;
  SparseRowMatrix w(n, n);
  w.reserve(n * static_cast<std::size_t>(p.window) * p.window);

  std::vector<SparseEntry> rowbuf;
  for (int r = 0; r < height; ++r) {
    const int r0 = std::max(0, r - half), r1 = std::min(height - 1, r + half);
    for (int c = 0; c < width; ++c) {
      const int c0 = std::max(0, c - half), c1 = std::min(width - 1, c + half);
      const std::size_t i = static_cast<std::size_t>(r) * width + c;
      rowbuf.clear();
      double sum = 0.0;
      for (int nr = r0; nr <= r1; ++nr) {
        for (int nc = c0; nc <= c1; ++nc) {
          const std::size_t j = static_cast<std::size_t>(nr) * width + nc;
          const double dr = nr - r, dc = nc - c;
          double e = (dr * dr + dc * dc) * inv_ss + range2(i, j) * inv_sr;
          const double weight = std::exp(-e);
          rowbuf.push_back({static_cast<std::uint32_t>(j), weight});
          sum += weight;
        }
      }
      for (auto& entry : rowbuf) entry.value /= sum;
      w.append_row(rowbuf);
    }
  }
  return AffinityMatrix{std::move(w)};
}

}  // namespace

AffinityMatrix build_gaussian_affinity(int height, int width, const KernelParams& p) {
  validate_kernel_params(p);
  if (p.sigma_r)
    throw ParamError("build_gaussian_affinity: sigma_r set on a spatial kernel");
  return build_affinity(height, width, p, [](std::size_t, std::size_t) { return 0.0; });
}

AffinityMatrix build_bilateral_affinity(const RasterImage& guide, const KernelParams& p) {
  validate_kernel_params(p);
  if (!p.sigma_r)
    throw ParamError("build_bilateral_affinity: sigma_r is required");
  require_finite(guide, "build_bilateral_affinity");
  const int ch = guide.channels();
  auto v = guide.values();
  auto range2 = [&](std::size_t i, std::size_t j) {
    double d2 = 0.0;
    for (int k = 0; k < ch; ++k) {
      const double d = v[i * ch + k] - v[j * ch + k];
      d2 += d * d;
    }
    return d2;
  };
  return build_affinity(guide.height(), guide.width(), p, range2);
}

RasterImage apply_affinity(const AffinityMatrix& K, const RasterImage& img) {
  if (K.n() != img.pixel_count())
    throw ShapeError("apply_affinity: pixel count does not match the matrix");
  RasterImage out(img.height(), img.width(), img.channels());
  std::vector<double> plane(img.pixel_count());
  std::vector<double> smoothed(img.pixel_count());
  for (int ch = 0; ch < img.channels(); ++ch) {
    auto src = img.values();
    for (std::size_t i = 0; i < plane.size(); ++i)
      plane[i] = src[i * img.channels() + ch];
    K.weights.apply(plane, smoothed);
    out.set_plane(ch, smoothed);
  }
  return out;
}

void dump_affinity_row(std::ostream& os, const AffinityMatrix& K, std::size_t row) {
  K.weights.write_row(os, row);
}

}  // namespace iit
