#include "iit/lle.hpp"

#include <cmath>
#include <cstring>
#include <ostream>
#include <vector>

namespace iit {

namespace {

// In-place Cholesky solve of the k-by-k SPD system a x = rhs (row-major,
// lower triangle used). Returns false on a non-positive pivot.
bool cholesky_solve(std::vector<double>& a, std::vector<double>& rhs, int k) {
  double max_diag = 0.0;
  for (int i = 0; i < k; ++i) max_diag = std::max(max_diag, a[i * k + i]);
  const double pivot_floor = max_diag * 1e-15;

  for (int j = 0; j < k; ++j) {
    double d = a[j * k + j];
    for (int t = 0; t < j; ++t) d -= a[j * k + t] * a[j * k + t];
    if (!(d > pivot_floor) || !std::isfinite(d)) return false;
    const double lj = std::sqrt(d);
    a[j * k + j] = lj;
    for (int i = j + 1; i < k; ++i) {
      double v = a[i * k + j];
      for (int t = 0; t < j; ++t) v -= a[i * k + t] * a[j * k + t];
      a[i * k + j] = v / lj;
    }
  }
  // forward substitution L y = rhs
  for (int i = 0; i < k; ++i) {
    double v = rhs[i];
    for (int t = 0; t < i; ++t) v -= a[i * k + t] * rhs[t];
    rhs[i] = v / a[i * k + i];
  }
  // back substitution L' x = y
  for (int i = k - 1; i >= 0; --i) {
    double v = rhs[i];
    for (int t = i + 1; t < k; ++t) v -= a[t * k + i] * rhs[t];
    rhs[i] = v / a[i * k + i];
  }
  return true;
}

// Gram solve on the difference vectors: diffs is k rows of d dimensions,
// C_jt = diffs_j . diffs_t. Writes the normalized weights into w.
void local_weights_from_diffs(const std::vector<double>& diffs, int k, int d,
                              double epsilon, bool scale_trace,
                              std::vector<double>& gram, std::vector<double>& w) {
  gram.assign(static_cast<std::size_t>(k) * k, 0.0);
  double trace = 0.0;
  for (int j = 0; j < k; ++j) {
    for (int t = 0; t <= j; ++t) {
      double acc = 0.0;
      for (int u = 0; u < d; ++u) acc += diffs[j * d + u] * diffs[t * d + u];
      gram[j * k + t] = acc;
      gram[t * k + j] = acc;
    }
    trace += gram[j * k + j];
  }

  double eps = scale_trace ? epsilon * trace : epsilon;
  if (scale_trace && trace == 0.0) eps = epsilon;  // constant patch: keep regularized
  for (int j = 0; j < k; ++j) gram[j * k + j] += eps;

  w.assign(k, 1.0);
  if (!cholesky_solve(gram, w, k))
    throw SingularError(
        "solve_local_weights: singular local system; use epsilon > 0");
  double sum = 0.0;
  for (double v : w) sum += v;
  if (sum == 0.0 || !std::isfinite(sum))
    throw SingularError(
        "solve_local_weights: degenerate local system; use epsilon > 0");
  for (double& v : w) v /= sum;
}

void validate_lle_params(const LleParams& p) {
  if (p.window < 3 || p.window % 2 == 0)
    throw ParamError("LLE window must be odd and >= 3");
  if (p.epsilon < 0.0) throw ParamError("LLE epsilon must be >= 0");
}

}  // namespace

std::vector<double> solve_local_weights(std::span<const double> center,
                                        std::span<const std::vector<double>> neighbors,
                                        double epsilon) {
  if (neighbors.empty())
    throw ParamError("solve_local_weights: at least one neighbor required");
  if (epsilon < 0.0) throw ParamError("solve_local_weights: epsilon must be >= 0");
  const int d = static_cast<int>(center.size());
  const int k = static_cast<int>(neighbors.size());
  std::vector<double> diffs(static_cast<std::size_t>(k) * d);
  for (int j = 0; j < k; ++j) {
    if (static_cast<int>(neighbors[j].size()) != d)
      throw ShapeError("solve_local_weights: neighbor dimension mismatch");
    for (int u = 0; u < d; ++u) diffs[j * d + u] = center[u] - neighbors[j][u];
  }
  std::vector<double> gram, w;
  local_weights_from_diffs(diffs, k, d, epsilon, false, gram, w);
  return w;
}

EncodingMatrix build_encoding_matrix(const RasterImage& img, const LleParams& p) {
  validate_lle_params(p);
  require_finite(img, "build_encoding_matrix");
  if (p.window > img.height() || p.window > img.width())
    throw ParamError("build_encoding_matrix: window larger than the image");
  if (p.feature_dim != img.channels())
    throw ParamError("build_encoding_matrix: feature_dim must match image channels");

  const int height = img.height(), width = img.width(), d = img.channels();
  const int half = p.window / 2;
  const std::size_t n = static_cast<std::size_t>(height) * width;
  auto v = img.values();

  SparseRowMatrix m(n, n);
  m.reserve(n * static_cast<std::size_t>(p.window) * p.window);

  std::vector<double> diffs, gram, w;
  std::vector<std::uint32_t> neighbor_idx;
  std::vector<SparseEntry> rowbuf;
  for (int r = 0; r < height; ++r) {
    const int r0 = std::max(0, r - half), r1 = std::min(height - 1, r + half);
    for (int c = 0; c < width; ++c) {
      const int c0 = std::max(0, c - half), c1 = std::min(width - 1, c + half);
      const std::size_t i = static_cast<std::size_t>(r) * width + c;

      neighbor_idx.clear();
      diffs.clear();
      for (int nr = r0; nr <= r1; ++nr) {
        for (int nc = c0; nc <= c1; ++nc) {
          if (nr == r && nc == c) continue;
          const std::size_t j = static_cast<std::size_t>(nr) * width + nc;
          neighbor_idx.push_back(static_cast<std::uint32_t>(j));
          for (int u = 0; u < d; ++u)
            diffs.push_back(v[i * d + u] - v[j * d + u]);
        }
      }
      const int k = static_cast<int>(neighbor_idx.size());
      local_weights_from_diffs(diffs, k, d, p.epsilon, p.eps_scale_trace, gram, w);

      // window scan yields ascending column order; slot the diagonal in place
      rowbuf.clear();
      bool diag_done = false;
      for (int j = 0; j < k; ++j) {
        if (!diag_done && neighbor_idx[j] > i) {
          rowbuf.push_back({static_cast<std::uint32_t>(i), 1.0});
          diag_done = true;
        }
        rowbuf.push_back({neighbor_idx[j], -w[j]});
      }
      if (!diag_done) rowbuf.push_back({static_cast<std::uint32_t>(i), 1.0});
      m.append_row(rowbuf);
    }
  }
  return EncodingMatrix{std::move(m)};
}

double encoding_residual(const EncodingMatrix& M, const RasterImage& img) {
  if (M.n() != img.pixel_count())
    throw ShapeError("encoding_residual: pixel count does not match the matrix");
  double total = 0.0;
  std::vector<double> plane(img.pixel_count());
  std::vector<double> res(img.pixel_count());
  auto src = img.values();
  for (int ch = 0; ch < img.channels(); ++ch) {
    for (std::size_t i = 0; i < plane.size(); ++i)
      plane[i] = src[i * img.channels() + ch];
    M.m.apply(plane, res);
    for (double r : res) total += r * r;
  }
  return total;
}

void dump_lle_weights(std::ostream& os, const EncodingMatrix& M, std::size_t row) {
  for (const auto& e : M.m.row(row))
    if (e.col != row) os << row << ' ' << e.col << ' ' << -e.value << '\n';
}

}  // namespace iit
