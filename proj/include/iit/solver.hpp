#pragma once

#include <span>
#include <utility>
#include <vector>

#include "iit/kernels.hpp"
#include "iit/lle.hpp"
#include "iit/sparse.hpp"

namespace iit {

enum class Preconditioner { none, jacobi };

struct SolverOptions {
  double rel_tol = 1e-6;
  int max_iter = 1000;
  Preconditioner preconditioner = Preconditioner::jacobi;
};

struct SolveReport {
  int iterations = 0;
  double final_rel_residual = 0.0;
  bool converged = false;
  double wall_time_s = 0.0;
};

// L = alpha K'K + beta M'M + gamma I: sparse, symmetric, positive definite
// for gamma > 0 (and in practice for alpha > 0 as well, K having full rank).
struct SystemMatrix {
  SparseRowMatrix l;
  std::size_t n() const noexcept { return l.rows(); }
};

// Raw quadratic terms plus the weighted total:
// total = alpha * illumination + beta * reflectance + gamma * content.
struct EnergyBreakdown {
  double total = 0.0;
  double illumination = 0.0;  // |K o - K c|^2
  double reflectance = 0.0;   // |M o|^2
  double content = 0.0;       // |o - s|^2
};

SystemMatrix assemble_system(const AffinityMatrix& K, const EncodingMatrix& M,
                             double alpha, double beta, double gamma);

// b = alpha K'(K c) + gamma s.
std::vector<double> assemble_rhs(const AffinityMatrix& K,
                                 std::span<const double> exemplar,
                                 std::span<const double> source,
                                 double alpha, double gamma);

// Preconditioned conjugate gradients. Returns the best iterate with
// converged=false if max_iter is exhausted; convergence is verified against
// the true residual |L x - b| <= rel_tol |b|. An optional warm start may be
// supplied; b = 0 returns the zero vector immediately.
std::pair<std::vector<double>, SolveReport> pcg_solve(const SystemMatrix& L,
                                                      std::span<const double> b,
                                                      const SolverOptions& opts,
                                                      std::span<const double> x0 = {});

// Direct dense Cholesky solve, guarded to n <= 10000. Verification path.
std::vector<double> dense_solve(const SystemMatrix& L, std::span<const double> b);

EnergyBreakdown energy(std::span<const double> o, std::span<const double> s,
                       std::span<const double> c, const AffinityMatrix& K,
                       const EncodingMatrix& M, double alpha, double beta,
                       double gamma);

// 2 (alpha K'(K o - K c) + beta M'M o + gamma (o - s)).
std::vector<double> energy_gradient(std::span<const double> o,
                                    std::span<const double> s,
                                    std::span<const double> c,
                                    const AffinityMatrix& K,
                                    const EncodingMatrix& M, double alpha,
                                    double beta, double gamma);

}  // namespace iit
