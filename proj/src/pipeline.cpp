#include "iit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace iit {

namespace {

void resolve_balance(IitParams& p) {
  if (p.alpha < 0.0 || p.beta < 0.0 || p.gamma < 0.0)
    throw ParamError("iit_transfer: balance weights must be >= 0");
  if (p.normalize_alpha_gamma) {
    const double sum = p.alpha + p.gamma;
    if (!(sum > 0.0))
      throw ParamError("iit_transfer: alpha + gamma must be positive to normalize");
    p.alpha /= sum;
    p.gamma /= sum;
  }
}

RasterImage to_working(const RasterImage& img, const IitParams& p) {
  return p.domain == DomainMode::log ? to_log_domain(img, p.log_domain) : img;
}

RasterImage from_working(const RasterImage& img, const IitParams& p) {
  return p.domain == DomainMode::log ? from_log_domain(img) : img;
}

AffinityMatrix build_kernel(const RasterImage& source, const IitParams& p) {
  if (p.kernel_type == KernelType::bilateral) {
    KernelParams kp = p.kernel;
    if (!kp.sigma_r) kp.sigma_r = 0.2;
    // range weights always come from the source's linear-domain intensities
    return build_bilateral_affinity(source, kp);
  }
  KernelParams kp = p.kernel;
  kp.sigma_r.reset();
  return build_gaussian_affinity(source.height(), source.width(), p.kernel);
}

std::size_t clamp_unit(RasterImage& img) {
  std::size_t clamped = 0;
  for (double& v : img.values()) {
    if (v < 0.0 || v > 1.0) {
      v = std::clamp(v, 0.0, 1.0);
      ++clamped;
    }
  }
  return clamped;
}

// Solves the per-plane system and fills diagnostics. The warm start at the
// source plane keeps the energy non-increasing from E(s).
std::vector<double> solve_plane(const AffinityMatrix& K, const EncodingMatrix& M,
                                std::span<const double> s, std::span<const double> c,
                                const IitParams& p, PlaneDiagnostics& diag) {
  const SystemMatrix L = assemble_system(K, M, p.alpha, p.beta, p.gamma);
  const std::vector<double> b = assemble_rhs(K, c, s, p.alpha, p.gamma);
  auto [x, report] = pcg_solve(L, b, p.solver, s);
  diag.solve = report;
  diag.energy_source = energy(s, s, c, K, M, p.alpha, p.beta, p.gamma);
  diag.energy_exemplar = energy(c, s, c, K, M, p.alpha, p.beta, p.gamma);
  diag.energy_output = energy(x, s, c, K, M, p.alpha, p.beta, p.gamma);
  return x;
}

RasterImage luminance_of(const RasterImage& img) {
  return img.channels() == 3 ? rgb_to_luminance(img) : img;
}

// Log-luminance rescaled to [0,1]; constant images map to 0.5.
RasterImage normalized_log_luminance(const RasterImage& lum) {
  RasterImage z(lum.height(), lum.width(), 1);
  auto src = lum.values();
  auto dst = z.values();
  double lo = std::log(src[0]), hi = lo;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double l = std::log(src[i]);
    dst[i] = l;
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  const double span = hi - lo;
  for (double& v : dst) v = span > 0.0 ? (v - lo) / span : 0.5;
  return z;
}

}  // namespace

TransferResult iit_transfer(const RasterImage& source, const RasterImage& exemplar,
                            const IitParams& params) {
  const auto t_begin = std::chrono::steady_clock::now();
  require_same_shape(source, exemplar, "iit_transfer");
  require_finite(source, "iit_transfer source");
  require_finite(exemplar, "iit_transfer exemplar");
  if (source.empty()) throw ShapeError("iit_transfer: empty image");
  if (source.min_value() < 0.0 || source.max_value() > 1.0)
    throw ImageError("iit_transfer: source intensities must lie in [0,1]");
  if (exemplar.min_value() < 0.0 || exemplar.max_value() > 1.0)
    throw ImageError("iit_transfer: exemplar intensities must lie in [0,1]");

  IitParams p = params;
  resolve_balance(p);

  TransferResult result;
  result.diagnostics.params = p;

  const AffinityMatrix K = build_kernel(source, p);

  if (p.channel_mode == ChannelMode::luminance_only && source.channels() == 3) {
    const RasterImage lum_in = rgb_to_luminance(source);
    const RasterImage lum_ex = luminance_of(exemplar);
    const RasterImage ws = to_working(lum_in, p);
    const RasterImage wc = to_working(lum_ex, p);

    LleParams lp = p.lle;
    lp.feature_dim = 1;
    const EncodingMatrix M = build_encoding_matrix(ws, lp);

    PlaneDiagnostics diag;
    diag.plane = 0;
    const std::vector<double> x = solve_plane(K, M, ws.values(), wc.values(), p, diag);
    result.diagnostics.planes.push_back(diag);
    result.diagnostics.all_converged = diag.solve.converged;

    RasterImage lum_out(source.height(), source.width(), 1, 0.0);
    lum_out.set_plane(0, x);
    lum_out = from_working(lum_out, p);

    // scale chroma by the luminance ratio, floored against black pixels
    RasterImage out(source.height(), source.width(), 3);
    const double floor = p.log_domain.epsilon_floor;
    for (int y = 0; y < source.height(); ++y)
      for (int xx = 0; xx < source.width(); ++xx) {
        const double ratio = lum_out.at(y, xx) / std::max(lum_in.at(y, xx), floor);
        for (int ch = 0; ch < 3; ++ch)
          out.at(y, xx, ch) = source.at(y, xx, ch) * ratio;
      }
    result.image = std::move(out);
  } else {
    const RasterImage ws = to_working(source, p);
    const RasterImage wc = to_working(exemplar, p);

    const bool joint = p.lle.feature_dim == 3 && source.channels() == 3;
    EncodingMatrix joint_m;
    if (joint) joint_m = build_encoding_matrix(ws, p.lle);

    RasterImage out(source.height(), source.width(), source.channels());
    for (int ch = 0; ch < source.channels(); ++ch) {
      const RasterImage sp = ws.plane(ch);
      const RasterImage cp = wc.plane(ch);
      EncodingMatrix plane_m;
      if (!joint) {
        LleParams lp = p.lle;
        lp.feature_dim = 1;
        plane_m = build_encoding_matrix(sp, lp);
      }
      const EncodingMatrix& M = joint ? joint_m : plane_m;

      PlaneDiagnostics diag;
      diag.plane = ch;
      const std::vector<double> x = solve_plane(K, M, sp.values(), cp.values(), p, diag);
      result.diagnostics.all_converged &= diag.solve.converged;
      result.diagnostics.planes.push_back(diag);
      out.set_plane(ch, x);
    }
    result.image = from_working(out, p);
  }

  result.diagnostics.clamped_pixels = clamp_unit(result.image);
  result.diagnostics.total_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return result;
}

RasterImage restore_saturation(const RasterImage& input, const RasterImage& lum_in,
                               const RasterImage& lum_out, double s_exponent) {
  if (!(s_exponent > 0.0 && s_exponent <= 1.0))
    throw ParamError("restore_saturation: saturation exponent must lie in (0,1]");
  if (lum_in.channels() != 1 || lum_out.channels() != 1)
    throw ShapeError("restore_saturation: luminance images must be single-channel");
  if (lum_in.pixel_count() != input.pixel_count() ||
      lum_out.pixel_count() != input.pixel_count())
    throw ShapeError("restore_saturation: luminance size mismatch");
  if (lum_in.min_value() <= 0.0)
    throw ImageError("restore_saturation: input luminance must be positive");

  RasterImage out(input.height(), input.width(), input.channels());
  const int ch = input.channels();
  auto src = input.values();
  auto li = lum_in.values();
  auto lo = lum_out.values();
  auto dst = out.values();
  const std::size_t n = input.pixel_count();
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < ch; ++k)
      dst[i * ch + k] = std::pow(src[i * ch + k] / li[i], s_exponent) * lo[i];
  return out;
}

TransferResult hdr_compress(const RasterImage& hdr, const RasterImage& exemplar_lum,
                            const HdrParams& params) {
  if (hdr.empty()) throw ShapeError("hdr_compress: empty image");
  require_finite(hdr, "hdr_compress");
  if (hdr.min_value() <= 0.0)
    throw ImageError("hdr_compress: HDR values must be positive");
  if (!(params.s_exponent > 0.0 && params.s_exponent <= 1.0))
    throw ParamError("hdr_compress: saturation exponent must lie in (0,1]");
  if (exemplar_lum.channels() != 1 || exemplar_lum.pixel_count() != hdr.pixel_count())
    throw ShapeError("hdr_compress: exemplar must be single-channel and match the input");

  const RasterImage lum_in = luminance_of(hdr);

  // normalized log-luminance is the solve variable; the log already happened,
  // so the transfer itself runs in the linear domain
  const RasterImage z = normalized_log_luminance(lum_in);

  IitParams base = params.base;
  base.domain = DomainMode::linear;
  base.channel_mode = ChannelMode::per_channel;
  TransferResult lum_result = iit_transfer(z, exemplar_lum, base);

  TransferResult result;
  result.diagnostics = lum_result.diagnostics;
  result.image =
      restore_saturation(hdr, lum_in, lum_result.image, params.s_exponent);
  result.diagnostics.clamped_pixels = clamp_unit(result.image);
  return result;
}

TransferResult hdr_compress_auto(const RasterImage& hdr, const HdrParams& params) {
  if (hdr.empty()) throw ShapeError("hdr_compress: empty image");
  require_finite(hdr, "hdr_compress");
  if (hdr.min_value() <= 0.0)
    throw ImageError("hdr_compress: HDR values must be positive");

  const RasterImage z = normalized_log_luminance(luminance_of(hdr));
  const RasterImage exemplar = clahe(z, params.exemplar_clahe);
  return hdr_compress(hdr, exemplar, params);
}

IntrinsicLayers decompose_smooth(const RasterImage& img, const AffinityMatrix& K,
                                 const LogDomainParams& lp) {
  const RasterImage log_img = to_log_domain(img, lp);
  RasterImage illumination = apply_affinity(K, log_img);
  RasterImage reflectance(img.height(), img.width(), img.channels());
  auto l = illumination.values();
  auto s = log_img.values();
  auto r = reflectance.values();
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = s[i] - l[i];
  return IntrinsicLayers{std::move(illumination), std::move(reflectance)};
}

}  // namespace iit
