#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "iit/kernels.hpp"
#include "iit/lle.hpp"

namespace iit {

// Independent brute-force verifiers for the production path. Everything here
// goes through dense linear algebra or plain iteration, never through the
// sparse solver it checks.

struct FiniteDiffSpec {
  double step = 1e-5;
  enum class Scheme { central } scheme = Scheme::central;
};

// Dense assembly of alpha K'K + beta M'M + gamma I and a direct solve of the
// normal equations. Guarded to n <= 4096.
std::vector<double> brute_force_minimize(std::span<const double> s,
                                         std::span<const double> c,
                                         const AffinityMatrix& K,
                                         const EncodingMatrix& M,
                                         double alpha, double beta, double gamma);

// Central-difference gradient of an arbitrary energy. Guarded to n <= 1024.
std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& energy_fn,
    std::span<const double> at, const FiniteDiffSpec& spec);

// Fixed-step gradient descent on |center - sum w_j neighbor_j|^2 + eps |w|^2,
// projected onto the affine constraint sum w = 1 after every step. Converges
// to the closed-form KKT point for eps > 0.
std::vector<double> projected_gradient_weights(
    std::span<const double> center,
    std::span<const std::vector<double>> neighbors, double epsilon, long iters);

// Seeded battery of oracle-vs-production checks; prints one line per check.
// Returns true when every check passes.
bool oracle_battery(std::uint64_t seed, std::ostream& out);

}  // namespace iit
