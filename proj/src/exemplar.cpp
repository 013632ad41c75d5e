#include "iit/exemplar.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "iit/image_io.hpp"

namespace iit {

namespace {

void validate_clahe_params(const ClaheParams& p, const RasterImage& img) {
  if (!(p.clip_limit > 0.0)) throw ParamError("clahe: clip_limit must be > 0");
  if (p.tiles_x < 1 || p.tiles_y < 1) throw ParamError("clahe: tile counts must be >= 1");
  if (p.bins < 2) throw ParamError("clahe: bins must be >= 2");
  if (p.tiles_x > img.width() || p.tiles_y > img.height())
    throw ParamError("clahe: more tiles than pixels along an axis");
}

int bin_of(double v, int bins) {
  const int b = static_cast<int>(v * bins);
  return std::clamp(b, 0, bins - 1);
}

struct TileGrid {
  int tiles_x, tiles_y, tile_w, tile_h;
  int x0(int tx) const { return tx * tile_w; }
  int y0(int ty) const { return ty * tile_h; }
  int x1(int tx, int width) const { return std::min(width, (tx + 1) * tile_w); }
  int y1(int ty, int height) const { return std::min(height, (ty + 1) * tile_h); }
  double center_x(int tx, int width) const {
    return x0(tx) + (x1(tx, width) - 1 - x0(tx)) / 2.0;
  }
  double center_y(int ty, int height) const {
    return y0(ty) + (y1(ty, height) - 1 - y0(ty)) / 2.0;
  }
};

TileGrid make_grid(const RasterImage& img, const ClaheParams& p) {
  return TileGrid{p.tiles_x, p.tiles_y,
                  (img.width() + p.tiles_x - 1) / p.tiles_x,
                  (img.height() + p.tiles_y - 1) / p.tiles_y};
}

RasterImage clahe_single(const RasterImage& img, const ClaheParams& p) {
  const ClaheMappings maps = clahe_mappings(img, p);
  const TileGrid grid = make_grid(img, p);
  const int width = img.width(), height = img.height();

  // per-coordinate interpolation tables between tile centers
  std::vector<int> txl(width), txr(width);
  std::vector<double> fx(width);
  for (int x = 0; x < width; ++x) {
    int t = -1;
    while (t + 1 < grid.tiles_x && grid.center_x(t + 1, width) <= x) ++t;
    txl[x] = std::clamp(t, 0, grid.tiles_x - 1);
    txr[x] = std::clamp(t + 1, 0, grid.tiles_x - 1);
    if (t < 0 || t + 1 >= grid.tiles_x) {
      fx[x] = 0.0;
    } else {
      const double c0 = grid.center_x(t, width), c1 = grid.center_x(t + 1, width);
      fx[x] = (x - c0) / (c1 - c0);
    }
  }
  std::vector<int> tyl(height), tyr(height);
  std::vector<double> fy(height);
  for (int y = 0; y < height; ++y) {
    int t = -1;
    while (t + 1 < grid.tiles_y && grid.center_y(t + 1, height) <= y) ++t;
    tyl[y] = std::clamp(t, 0, grid.tiles_y - 1);
    tyr[y] = std::clamp(t + 1, 0, grid.tiles_y - 1);
    if (t < 0 || t + 1 >= grid.tiles_y) {
      fy[y] = 0.0;
    } else {
      const double c0 = grid.center_y(t, height), c1 = grid.center_y(t + 1, height);
      fy[y] = (y - c0) / (c1 - c0);
    }
  }

  RasterImage out(height, width, 1);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int b = bin_of(img.at(y, x), p.bins);
      const double top = (1.0 - fx[x]) * maps.map(txl[x], tyl[y], b) +
                         fx[x] * maps.map(txr[x], tyl[y], b);
      const double bot = (1.0 - fx[x]) * maps.map(txl[x], tyr[y], b) +
                         fx[x] * maps.map(txr[x], tyr[y], b);
      out.at(y, x) = (1.0 - fy[y]) * top + fy[y] * bot;
    }
  }
  return out;
}

}  // namespace

ClaheMappings clahe_mappings(const RasterImage& img, const ClaheParams& p) {
  if (img.empty()) throw ShapeError("clahe: empty image");
  if (img.channels() != 1)
    throw ShapeError("clahe_mappings: expected a single-channel image");
  validate_clahe_params(p, img);
  require_finite(img, "clahe");
  if (img.min_value() < 0.0 || img.max_value() > 1.0)
    throw ImageError("clahe: intensities must lie in [0,1]");

  const TileGrid grid = make_grid(img, p);
  ClaheMappings maps{p.tiles_x, p.tiles_y, p.bins, {}};
  maps.table.assign(static_cast<std::size_t>(p.tiles_x) * p.tiles_y * p.bins, 0.0);

  std::vector<double> hist(p.bins);
  for (int ty = 0; ty < p.tiles_y; ++ty) {
    for (int tx = 0; tx < p.tiles_x; ++tx) {
      std::fill(hist.begin(), hist.end(), 0.0);
      const int x0 = grid.x0(tx), x1 = grid.x1(tx, img.width());
      const int y0 = grid.y0(ty), y1 = grid.y1(ty, img.height());
      const double npix = static_cast<double>(x1 - x0) * (y1 - y0);
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) hist[bin_of(img.at(y, x), p.bins)] += 1.0;

      // clip and redistribute the excess uniformly, single pass
      const double min_clip = std::ceil(npix / p.bins);
      const double threshold = min_clip + p.clip_limit * (npix - min_clip);
      double excess = 0.0;
      for (double& h : hist) {
        if (h > threshold) {
          excess += h - threshold;
          h = threshold;
        }
      }
      const double bonus = excess / p.bins;
      double cdf = 0.0;
      double* row = &maps.table[(static_cast<std::size_t>(ty) * p.tiles_x + tx) * p.bins];
      for (int b = 0; b < p.bins; ++b) {
        cdf += hist[b] + bonus;
        row[b] = cdf / npix;
      }
    }
  }
  return maps;
}

RasterImage clahe(const RasterImage& img, const ClaheParams& p) {
  if (img.empty()) throw ShapeError("clahe: empty image");
  if (img.channels() == 1) return clahe_single(img, p);

  // equalize luminance, rescale chroma proportionally
  const RasterImage lum = rgb_to_luminance(img);
  const RasterImage eq = clahe_single(lum, p);
  RasterImage out(img.height(), img.width(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double ratio = eq.at(y, x) / std::max(lum.at(y, x), 1e-12);
      for (int ch = 0; ch < 3; ++ch)
        out.at(y, x, ch) = std::clamp(img.at(y, x, ch) * ratio, 0.0, 1.0);
    }
  }
  return out;
}

RasterImage load_exemplar(const std::string& path) { return load_image(path); }

}  // namespace iit
