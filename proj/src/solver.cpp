#include "iit/solver.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "iit/errors.hpp"

namespace iit {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SystemMatrix assemble_system(const AffinityMatrix& K, const EncodingMatrix& M,
                             double alpha, double beta, double gamma) {
  if (K.n() != M.n()) throw ShapeError("assemble_system: K and M dimensions differ");
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0)
    throw ParamError("assemble_system: balance weights must be >= 0");
  if (alpha == 0.0 && beta == 0.0 && gamma == 0.0)
    throw ParamError("assemble_system: all balance weights are zero");
  if (alpha == 0.0 && gamma == 0.0)
    throw ParamError("assemble_system: alpha or gamma must be positive for definiteness");

  const SparseRowMatrix ktk =
      SparseRowMatrix::multiply(K.weights.transposed(), K.weights).symmetrized();
  const SparseRowMatrix mtm =
      SparseRowMatrix::multiply(M.m.transposed(), M.m).symmetrized();
  SparseRowMatrix l = SparseRowMatrix::add(alpha, ktk, beta, mtm);
  l = SparseRowMatrix::add(1.0, l, gamma, SparseRowMatrix::identity(K.n()));
  return SystemMatrix{std::move(l)};
}

std::vector<double> assemble_rhs(const AffinityMatrix& K,
                                 std::span<const double> exemplar,
                                 std::span<const double> source,
                                 double alpha, double gamma) {
  if (exemplar.size() != K.n() || source.size() != K.n())
    throw ShapeError("assemble_rhs: plane size does not match the matrix");
  const std::vector<double> kc = K.weights.apply(exemplar);
  std::vector<double> b = K.weights.apply_transpose(kc);
  for (std::size_t i = 0; i < b.size(); ++i)
    b[i] = alpha * b[i] + gamma * source[i];
  return b;
}

std::pair<std::vector<double>, SolveReport> pcg_solve(const SystemMatrix& L,
                                                      std::span<const double> b,
                                                      const SolverOptions& opts,
                                                      std::span<const double> x0) {
  const std::size_t n = L.n();
  if (b.size() != n) throw ShapeError("pcg_solve: rhs size does not match the matrix");
  if (!x0.empty() && x0.size() != n)
    throw ShapeError("pcg_solve: warm start size does not match the matrix");
  if (!(opts.rel_tol > 0.0) || opts.max_iter < 1)
    throw ParamError("pcg_solve: rel_tol must be > 0 and max_iter >= 1");

  const auto t_begin = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
        .count();
  };

  SolveReport report;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    report.converged = true;
    report.wall_time_s = elapsed();
    return {std::vector<double>(n, 0.0), report};
  }

  std::vector<double> inv_diag;
  if (opts.preconditioner == Preconditioner::jacobi) {
    inv_diag = L.l.diagonal();
    for (double& d : inv_diag) {
      if (!(d > 0.0)) throw SingularError("pcg_solve: non-positive diagonal entry");
      d = 1.0 / d;
    }
  }
  auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
    if (inv_diag.empty()) {
      z = r;
    } else {
      z.resize(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    }
  };

  std::vector<double> x(n, 0.0);
  if (!x0.empty()) x.assign(x0.begin(), x0.end());

  std::vector<double> r(n), z, p, q(n);
  L.l.apply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

  double rnorm = norm2(r);
  const double target = opts.rel_tol * bnorm;
  if (rnorm <= target) {
    report.converged = true;
    report.final_rel_residual = rnorm / bnorm;
    report.wall_time_s = elapsed();
    return {std::move(x), report};
  }

  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  int iter = 0;
  while (iter < opts.max_iter) {
    ++iter;
    L.l.apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0))
      throw SingularError("pcg_solve: matrix is not positive definite");
    const double step = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * q[i];
    }
    rnorm = norm2(r);
    if (rnorm <= target) {
      // guard against recurrence drift: confirm with the true residual
      L.l.apply(x, q);
      for (std::size_t i = 0; i < n; ++i) q[i] = b[i] - q[i];
      const double true_norm = norm2(q);
      if (true_norm <= target) {
        rnorm = true_norm;
        report.converged = true;
        break;
      }
      r = q;
      rnorm = true_norm;
    }
    precondition(r, z);
    const double rz_next = dot(r, z);
    const double ratio = rz_next / rz;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + ratio * p[i];
    rz = rz_next;
  }

  report.iterations = iter;
  report.final_rel_residual = rnorm / bnorm;
  report.wall_time_s = elapsed();
  return {std::move(x), report};
}

std::vector<double> dense_solve(const SystemMatrix& L, std::span<const double> b) {
  const std::size_t n = L.n();
  if (n > 10000) throw ParamError("dense_solve: refused, n exceeds the 10000 guard");
  if (b.size() != n) throw ShapeError("dense_solve: rhs size does not match the matrix");

  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (const auto& e : L.l.row(r)) dense(r, e.col) = e.value;

  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n));
  Eigen::LLT<Eigen::MatrixXd> llt(dense);
  if (llt.info() != Eigen::Success)
    throw SingularError("dense_solve: Cholesky factorization failed");
  Eigen::VectorXd x = llt.solve(rhs);
  return std::vector<double>(x.data(), x.data() + n);
}

EnergyBreakdown energy(std::span<const double> o, std::span<const double> s,
                       std::span<const double> c, const AffinityMatrix& K,
                       const EncodingMatrix& M, double alpha, double beta,
                       double gamma) {
  const std::size_t n = K.n();
  if (o.size() != n || s.size() != n || c.size() != n || M.n() != n)
    throw ShapeError("energy: plane sizes do not match");

  const std::vector<double> ko = K.weights.apply(o);
  const std::vector<double> kc = K.weights.apply(c);
  const std::vector<double> mo = M.m.apply(o);

  EnergyBreakdown e;
  for (std::size_t i = 0; i < n; ++i) {
    const double di = ko[i] - kc[i];
    e.illumination += di * di;
    e.reflectance += mo[i] * mo[i];
    const double dc = o[i] - s[i];
    e.content += dc * dc;
  }
  e.total = alpha * e.illumination + beta * e.reflectance + gamma * e.content;
  return e;
}

std::vector<double> energy_gradient(std::span<const double> o,
                                    std::span<const double> s,
                                    std::span<const double> c,
                                    const AffinityMatrix& K,
                                    const EncodingMatrix& M, double alpha,
                                    double beta, double gamma) {
  const std::size_t n = K.n();
  if (o.size() != n || s.size() != n || c.size() != n || M.n() != n)
    throw ShapeError("energy_gradient: plane sizes do not match");

  std::vector<double> ko = K.weights.apply(o);
  const std::vector<double> kc = K.weights.apply(c);
  for (std::size_t i = 0; i < n; ++i) ko[i] -= kc[i];
  const std::vector<double> kt = K.weights.apply_transpose(ko);

  const std::vector<double> mo = M.m.apply(o);
  const std::vector<double> mtmo = M.m.apply_transpose(mo);

  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = 2.0 * (alpha * kt[i] + beta * mtmo[i] + gamma * (o[i] - s[i]));
  return g;
}

}  // namespace iit
