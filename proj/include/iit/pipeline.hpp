#pragma once

#include <vector>

#include "iit/exemplar.hpp"
#include "iit/image.hpp"
#include "iit/kernels.hpp"
#include "iit/lle.hpp"
#include "iit/solver.hpp"

namespace iit {

enum class KernelType { gaussian, bilateral };
enum class DomainMode { log, linear };
enum class ChannelMode { per_channel, luminance_only };

// Full transfer configuration. Defaults match the CLAHE-exemplar regime:
// alpha 0.8, beta 100, gamma 0.2, Gaussian 5x5 sigma_s 2.0, LLE 5x5 eps 1e-5,
// log domain, per-channel planes.
struct IitParams {
  double alpha = 0.8;
  double beta = 100.0;
  double gamma = 0.2;
  KernelType kernel_type = KernelType::gaussian;
  KernelParams kernel{};
  LleParams lle{};
  DomainMode domain = DomainMode::log;
  ChannelMode channel_mode = ChannelMode::per_channel;
  // Rescale alpha and gamma so they sum to 1, keeping the output between
  // source and exemplar.
  bool normalize_alpha_gamma = true;
  SolverOptions solver{};
  LogDomainParams log_domain{};
};

struct PlaneDiagnostics {
  int plane = 0;
  EnergyBreakdown energy_source;    // E evaluated at the source plane
  EnergyBreakdown energy_exemplar;  // E evaluated at the exemplar plane
  EnergyBreakdown energy_output;    // E evaluated at the solution
  SolveReport solve;
};

struct TransferDiagnostics {
  IitParams params;  // resolved values (after alpha/gamma normalization)
  std::vector<PlaneDiagnostics> planes;
  std::size_t clamped_pixels = 0;
  bool all_converged = true;
  double total_time_s = 0.0;
};

struct TransferResult {
  RasterImage image;
  TransferDiagnostics diagnostics;
};

// Translates the source's structure onto the exemplar's illumination by
// solving (alpha K'K + beta M'M + gamma I) o = alpha K'K c + gamma s per
// channel plane in the working domain. Output is clamped to [0,1] at the
// very end; the clamp count is reported in the diagnostics.
TransferResult iit_transfer(const RasterImage& source, const RasterImage& exemplar,
                            const IitParams& p);

struct HdrParams {
  // Saturation exponent of the color restoration, in (0,1].
  double s_exponent = 0.5;
  IitParams base{};
  ClaheParams exemplar_clahe{};
};

// C_out = (C_in / L_in)^s * L_out per channel. No clamping here.
RasterImage restore_saturation(const RasterImage& input, const RasterImage& lum_in,
                               const RasterImage& lum_out, double s_exponent);

// Compresses HDR radiance to display range: transfers the normalized
// log-luminance onto the exemplar, then restores color per channel.
TransferResult hdr_compress(const RasterImage& hdr, const RasterImage& exemplar_lum,
                            const HdrParams& p);

// Same, with the exemplar synthesized by CLAHE on the normalized log-luminance.
TransferResult hdr_compress_auto(const RasterImage& hdr, const HdrParams& p);

// Smoothing-based layer split for the remap demonstration: illumination is
// the kernel-smoothed log image, reflectance the remainder.
IntrinsicLayers decompose_smooth(const RasterImage& img, const AffinityMatrix& K,
                                 const LogDomainParams& lp);

}  // namespace iit
