#pragma once

#include <string>
#include <vector>

#include "iit/image.hpp"

namespace iit {

// Contrast-limited adaptive histogram equalization parameters. clip_limit is
// the normalized contrast factor in (0, inf): the histogram clip threshold
// for a tile with N pixels is ceil(N / bins) + clip_limit * (N - ceil(N / bins)),
// so clip_limit >= 1 disables clipping entirely.
struct ClaheParams {
  double clip_limit = 0.01;
  int tiles_x = 8;
  int tiles_y = 8;
  int bins = 256;
};

// Per-tile transfer functions, tile-major: table[(ty * tiles_x + tx) * bins + b].
// Each mapping is a clipped-histogram CDF, monotone non-decreasing in [0,1].
struct ClaheMappings {
  int tiles_x = 0;
  int tiles_y = 0;
  int bins = 0;
  std::vector<double> table;

  double map(int tx, int ty, int bin) const noexcept {
    return table[(static_cast<std::size_t>(ty) * tiles_x + tx) * bins + bin];
  }
};

ClaheMappings clahe_mappings(const RasterImage& single_channel, const ClaheParams& p);

// Tile-wise clipped-histogram equalization with bilinear blending of the
// per-tile mappings. 3-channel images are equalized on luminance with the
// chroma rescaled proportionally.
RasterImage clahe(const RasterImage& img, const ClaheParams& p);

// Loads an externally produced exemplar image (same formats as image_io).
RasterImage load_exemplar(const std::string& path);

}  // namespace iit
