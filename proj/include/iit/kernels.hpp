#pragma once

#include <iosfwd>
#include <optional>

#include "iit/image.hpp"
#include "iit/sparse.hpp"

namespace iit {

// Smoothing kernel configuration. The window is the full odd spatial extent
// of the neighborhood (5 means 5x5, center included). sigma_r is present iff
// the kernel is bilateral; range distances are measured on the guide's
// linear-domain intensities.
struct KernelParams {
  int window = 5;
  double sigma_s = 2.0;
  std::optional<double> sigma_r;
};

// Sparse row-stochastic smoothing operator: every row sums to 1, all weights
// are nonnegative, and the support of row i lies inside the spatial window
// of pixel i (clipped at image borders).
struct AffinityMatrix {
  SparseRowMatrix weights;
  std::size_t n() const noexcept { return weights.rows(); }
};

// Weights exp(-|p_i - p_j|^2 / sigma_s^2) over the window of each pixel,
// row-normalized. Note the exponent uses 1/sigma^2, not 1/(2 sigma^2).
AffinityMatrix build_gaussian_affinity(int height, int width, const KernelParams& p);

// Spatial term as above times exp(-|I_i - I_j|^2 / sigma_r^2) with I the
// guide intensity (all channels concatenated).
AffinityMatrix build_bilateral_affinity(const RasterImage& guide, const KernelParams& p);

// Per-channel sparse matrix-vector product; a convex combination per pixel,
// so constants are preserved and the range never expands.
RasterImage apply_affinity(const AffinityMatrix& K, const RasterImage& img);

void dump_affinity_row(std::ostream& os, const AffinityMatrix& K, std::size_t row);

}  // namespace iit
