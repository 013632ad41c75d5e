#include "iit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "iit/pipeline.hpp"
#include "iit/solver.hpp"

namespace iit {

namespace {

Eigen::MatrixXd to_dense(const SparseRowMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (const auto& e : m.row(r)) d(r, e.col) = e.value;
  return d;
}

}  // namespace

std::vector<double> brute_force_minimize(std::span<const double> s,
                                         std::span<const double> c,
                                         const AffinityMatrix& K,
                                         const EncodingMatrix& M,
                                         double alpha, double beta, double gamma) {
  const std::size_t n = K.n();
  if (n > 4096) throw ParamError("brute_force_minimize: n exceeds the 4096 guard");
  if (s.size() != n || c.size() != n || M.n() != n)
    throw ShapeError("brute_force_minimize: plane sizes do not match");

  const Eigen::MatrixXd kd = to_dense(K.weights);
  const Eigen::MatrixXd md = to_dense(M.m);
  const Eigen::MatrixXd lhs = alpha * kd.transpose() * kd +
                              beta * md.transpose() * md +
                              gamma * Eigen::MatrixXd::Identity(n, n);
  const Eigen::Map<const Eigen::VectorXd> sv(s.data(), static_cast<Eigen::Index>(n));
  const Eigen::Map<const Eigen::VectorXd> cv(c.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd rhs = alpha * (kd.transpose() * (kd * cv)) + gamma * sv;
  const Eigen::VectorXd x = Eigen::LLT<Eigen::MatrixXd>(lhs).solve(rhs);
  return std::vector<double>(x.data(), x.data() + n);
}

std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& energy_fn,
    std::span<const double> at, const FiniteDiffSpec& spec) {
  if (!(spec.step > 0.0)) throw ParamError("finite_diff_gradient: step must be > 0");
  if (at.size() > 1024) throw ParamError("finite_diff_gradient: n exceeds the 1024 guard");

  std::vector<double> point(at.begin(), at.end());
  std::vector<double> grad(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + spec.step;
    const double plus = energy_fn(point);
    point[i] = saved - spec.step;
    const double minus = energy_fn(point);
    point[i] = saved;
    grad[i] = (plus - minus) / (2.0 * spec.step);
  }
  return grad;
}

std::vector<double> projected_gradient_weights(
    std::span<const double> center,
    std::span<const std::vector<double>> neighbors, double epsilon, long iters) {
  if (neighbors.empty())
    throw ParamError("projected_gradient_weights: at least one neighbor required");
  if (iters < 1) throw ParamError("projected_gradient_weights: iters must be >= 1");
  const int d = static_cast<int>(center.size());
  const int k = static_cast<int>(neighbors.size());

  // Lipschitz bound of the gradient: 2 (|N|_F^2 + eps)
  double frob2 = 0.0;
  for (const auto& nb : neighbors)
    for (double v : nb) frob2 += v * v;
  const double step = 1.0 / (2.0 * (frob2 + epsilon) + 1e-30);

  std::vector<double> w(k, 1.0 / k);
  std::vector<double> residual(d);
  std::vector<double> grad(k);
  for (long it = 0; it < iters; ++it) {
    for (int u = 0; u < d; ++u) {
      double acc = center[u];
      for (int j = 0; j < k; ++j) acc -= w[j] * neighbors[j][u];
      residual[u] = acc;
    }
    double gmean = 0.0;
    for (int j = 0; j < k; ++j) {
      double g = 2.0 * epsilon * w[j];
      for (int u = 0; u < d; ++u) g -= 2.0 * neighbors[j][u] * residual[u];
      grad[j] = g;
      gmean += g;
    }
    gmean /= k;
    double max_update = 0.0;
    for (int j = 0; j < k; ++j) {
      const double delta = step * (grad[j] - gmean);  // projected direction
      w[j] -= delta;
      max_update = std::max(max_update, std::abs(delta));
    }
    if (max_update < 1e-16) break;
  }
  return w;
}

bool oracle_battery(std::uint64_t seed, std::ostream& out) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  bool all_ok = true;
  auto check = [&](const char* name, bool ok, double value) {
    out << (ok ? "[pass] " : "[FAIL] ") << name << " (" << value << ")\n";
    all_ok &= ok;
  };

  // pipeline vs dense normal equations, 16x16 instances
  {
    const int side = 16;
    double worst = 0.0;
    for (int inst = 0; inst < 3; ++inst) {
      RasterImage s(side, side, 1), c(side, side, 1);
      for (double& v : s.values()) v = unit(rng);
      for (double& v : c.values()) v = unit(rng);

      IitParams p;
      p.solver.rel_tol = 1e-12;
      p.solver.max_iter = 5000;
      const RasterImage got = iit_transfer(s, c, p).image;

      const LogDomainParams ld;
      const RasterImage ws = to_log_domain(s, ld);
      const RasterImage wc = to_log_domain(c, ld);
      const AffinityMatrix K = build_gaussian_affinity(side, side, KernelParams{});
      const EncodingMatrix M = build_encoding_matrix(ws, LleParams{});
      std::vector<double> x =
          brute_force_minimize(ws.values(), wc.values(), K, M, 0.8, 100.0, 0.2);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double ref = std::clamp(std::exp(x[i]), 0.0, 1.0);
        const double diff = got.values()[i] - ref;
        num += diff * diff;
        den += ref * ref;
      }
      worst = std::max(worst, std::sqrt(num / den));
    }
    check("pipeline matches dense minimizer (rel L2)", worst <= 1e-6, worst);
  }

  // analytic gradient vs central differences, 8x8
  {
    const int side = 8;
    const std::size_t n = side * side;
    std::vector<double> s(n), c(n), o(n);
    std::uniform_real_distribution<double> logd(-4.0, 0.0);
    for (auto* v : {&s, &c, &o})
      for (double& x : *v) x = logd(rng);
    RasterImage si(side, side, 1, 0.0);
    si.set_plane(0, s);
    const AffinityMatrix K = build_gaussian_affinity(side, side, KernelParams{});
    const EncodingMatrix M = build_encoding_matrix(si, LleParams{});

    const auto efn = [&](std::span<const double> x) {
      return energy(x, s, c, K, M, 0.8, 100.0, 0.2).total;
    };
    const std::vector<double> numeric = finite_diff_gradient(efn, o, FiniteDiffSpec{});
    const std::vector<double> analytic = energy_gradient(o, s, c, K, M, 0.8, 100.0, 0.2);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = numeric[i] - analytic[i];
      num += diff * diff;
      den += analytic[i] * analytic[i];
    }
    const double rel = std::sqrt(num / den);
    check("analytic gradient matches finite differences", rel <= 1e-4, rel);
  }

  // closed-form local weights vs projected gradient descent
  {
    std::uniform_real_distribution<double> feat(0.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<double> center{feat(rng)};
      std::vector<std::vector<double>> neighbors(24);
      for (auto& nb : neighbors) nb = {feat(rng)};
      const auto direct = solve_local_weights(center, neighbors, 1e-5);
      const auto iterative =
          projected_gradient_weights(center, neighbors, 1e-5, 8'000'000);
      for (std::size_t j = 0; j < direct.size(); ++j)
        worst = std::max(worst, std::abs(direct[j] - iterative[j]));
    }
    check("LLE weights match projected-gradient oracle", worst <= 1e-6, worst);
  }

  // translation invariance of the encoding matrix
  {
    RasterImage img(12, 12, 1);
    for (double& v : img.values()) v = unit(rng);
    RasterImage shifted = img;
    for (double& v : shifted.values()) v += 0.37;
    const EncodingMatrix a = build_encoding_matrix(img, LleParams{});
    const EncodingMatrix b = build_encoding_matrix(shifted, LleParams{});
    double worst = 0.0;
    for (std::size_t r = 0; r < a.n(); ++r) {
      auto ra = a.m.row(r), rb = b.m.row(r);
      for (std::size_t i = 0; i < ra.size(); ++i)
        worst = std::max(worst, std::abs(ra[i].value - rb[i].value));
    }
    check("encoding weights are translation invariant", worst <= 1e-10, worst);
  }

  // PCG vs dense direct solve
  {
    const int side = 12;
    RasterImage s(side, side, 1);
    for (double& v : s.values()) v = unit(rng);
    const AffinityMatrix K = build_gaussian_affinity(side, side, KernelParams{});
    const EncodingMatrix M = build_encoding_matrix(s, LleParams{});
    const SystemMatrix L = assemble_system(K, M, 0.8, 100.0, 0.2);
    std::vector<double> b(L.n());
    for (double& v : b) v = unit(rng);
    SolverOptions opts;
    opts.rel_tol = 1e-10;
    opts.max_iter = 5000;
    const auto [x, rep] = pcg_solve(L, b, opts);
    const std::vector<double> ref = dense_solve(L, b);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      num += (x[i] - ref[i]) * (x[i] - ref[i]);
      den += ref[i] * ref[i];
    }
    const double rel = std::sqrt(num / den);
    check("PCG matches dense solve", rep.converged && rel <= 1e-6, rel);
  }

  return all_ok;
}

}  // namespace iit
