#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "iit/image.hpp"
#include "iit/sparse.hpp"

namespace iit {

// Locally-linear-embedding configuration. The window is the odd spatial
// extent of the neighbor set, which excludes the center pixel (a point does
// not reconstruct itself), so an interior pixel has window^2 - 1 neighbors.
struct LleParams {
  int window = 5;
  double epsilon = 1e-5;
  int feature_dim = 1;
  // Scale epsilon by trace of the local Gram matrix instead of using it as
  // an absolute value.
  bool eps_scale_trace = false;
};

// M = I - W: diagonal of 1, off-diagonal -w_ij confined to each pixel's
// window, with every W row summing to 1. M annihilates constant vectors.
struct EncodingMatrix {
  SparseRowMatrix m;
  std::size_t n() const noexcept { return m.rows(); }
};

// Minimizes |center - sum_j w_j neighbor_j|^2 + epsilon |w|^2 subject to
// sum_j w_j = 1, via the local Gram system (C + eps I) v = 1, w = v / sum v
// with C_jk = (center - neighbor_j) . (center - neighbor_k).
std::vector<double> solve_local_weights(std::span<const double> center,
                                        std::span<const std::vector<double>> neighbors,
                                        double epsilon);

EncodingMatrix build_encoding_matrix(const RasterImage& img, const LleParams& p);

// |M img|^2 summed over channels: the reflectance-consistency residual.
double encoding_residual(const EncodingMatrix& M, const RasterImage& img);

// Text dump of row weights as "row col w" triples (off-diagonals of W).
void dump_lle_weights(std::ostream& os, const EncodingMatrix& M, std::size_t row);

}  // namespace iit
