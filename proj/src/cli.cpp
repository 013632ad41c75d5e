#include "iit/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "iit/image_io.hpp"
#include "iit/oracle.hpp"
#include "iit/report.hpp"

namespace iit::cli {

namespace {

struct FlagState {
  std::optional<double> sigma_r;
  std::string kernel = "gaussian";
  std::string domain = "log";
  std::string channel_mode = "per-channel";
  std::string tiles = "8x8";
  bool eps_scale_trace = false;
  bool no_normalize_ag = false;
};

void parse_tiles(const std::string& text, ClaheParams& p) {
  int tx = 0, ty = 0;
  char sep = 0;
  std::istringstream in(text);
  if (!(in >> tx >> sep >> ty) || (sep != 'x' && sep != 'X') || tx < 1 || ty < 1 ||
      !in.eof())
    throw UsageError("--tiles expects NxM, e.g. 8x8");
  p.tiles_x = tx;
  p.tiles_y = ty;
}

void attach_transfer_flags(CLI::App* cmd, CliConfig& cfg, FlagState& st) {
  cmd->add_option("-i,--input", cfg.input, "Source image (PNG or PPM)")->required();
  cmd->add_option("-e,--exemplar", cfg.exemplar,
                  "Exemplar image; omitted: synthesized by CLAHE from the source");
  cmd->add_option("-o,--output", cfg.output, "Output image path")->required();
  cmd->add_option("--report", cfg.report, "Write the JSON run report to this path");
  cmd->add_option("--kernel", st.kernel, "Smoothing kernel")
      ->check(CLI::IsMember({"gaussian", "bilateral"}))
      ->capture_default_str();
  cmd->add_option("--window", cfg.iit.kernel.window, "Kernel window (odd)")
      ->capture_default_str();
  cmd->add_option("--sigma-s", cfg.iit.kernel.sigma_s, "Spatial standard deviation")
      ->capture_default_str();
  cmd->add_option("--sigma-r", st.sigma_r,
                  "Range standard deviation (bilateral only, default 0.2)");
  cmd->add_option("--lle-window", cfg.iit.lle.window, "Encoding window (odd)")
      ->capture_default_str();
  cmd->add_option("--lle-eps", cfg.iit.lle.epsilon, "Encoding regularization")
      ->capture_default_str();
  cmd->add_flag("--lle-eps-scale-trace", st.eps_scale_trace,
                "Scale --lle-eps by the local Gram trace");
  cmd->add_option("--alpha", cfg.iit.alpha, "Illumination weight")->capture_default_str();
  cmd->add_option("--beta", cfg.iit.beta, "Reflectance weight")->capture_default_str();
  cmd->add_option("--gamma", cfg.iit.gamma, "Content weight")->capture_default_str();
  cmd->add_flag("--no-normalize-ag", st.no_normalize_ag,
                "Do not rescale alpha and gamma to sum to 1");
  cmd->add_option("--domain", st.domain, "Working domain")
      ->check(CLI::IsMember({"log", "linear"}))
      ->capture_default_str();
  cmd->add_option("--channel-mode", st.channel_mode, "Channel strategy")
      ->check(CLI::IsMember({"per-channel", "luminance"}))
      ->capture_default_str();
  cmd->add_option("--tol", cfg.iit.solver.rel_tol, "Solver relative residual target")
      ->capture_default_str();
  cmd->add_option("--max-iter", cfg.iit.solver.max_iter, "Solver iteration cap")
      ->capture_default_str();
  cmd->add_option("--clip-limit", cfg.clahe.clip_limit,
                  "CLAHE clip limit for the auto exemplar")
      ->capture_default_str();
  cmd->add_option("--tiles", st.tiles, "CLAHE tile grid NxM for the auto exemplar")
      ->capture_default_str();
}

void finalize_iit(CliConfig& cfg, const FlagState& st) {
  cfg.iit.kernel_type =
      st.kernel == "bilateral" ? KernelType::bilateral : KernelType::gaussian;
  if (st.sigma_r) {
    if (cfg.iit.kernel_type != KernelType::bilateral)
      throw UsageError("--sigma-r is only valid with --kernel bilateral");
    cfg.iit.kernel.sigma_r = *st.sigma_r;
  } else if (cfg.iit.kernel_type == KernelType::bilateral) {
    cfg.iit.kernel.sigma_r = 0.2;
  }
  cfg.iit.domain = st.domain == "linear" ? DomainMode::linear : DomainMode::log;
  cfg.iit.channel_mode = st.channel_mode == "luminance" ? ChannelMode::luminance_only
                                                        : ChannelMode::per_channel;
  cfg.iit.lle.eps_scale_trace = st.eps_scale_trace;
  cfg.iit.normalize_alpha_gamma = !st.no_normalize_ag;
  parse_tiles(st.tiles, cfg.clahe);
}

int run_transfer(const CliConfig& cfg) {
  const RasterImage source = load_image(cfg.input);
  if (source.hdr())
    throw ImageError("transfer expects a display-referred image; use the hdr command");
  RasterImage exemplar;
  if (cfg.exemplar.empty()) {
    exemplar = clahe(source, cfg.clahe);
  } else {
    exemplar = load_exemplar(cfg.exemplar);
    require_same_shape(source, exemplar, "transfer");
  }

  const TransferResult result = iit_transfer(source, exemplar, cfg.iit);
  save_image(cfg.output, result.image);
  if (!cfg.report.empty()) write_report(cfg.report, result.diagnostics);
  if (!result.diagnostics.all_converged) {
    std::fprintf(stderr,
                 "warning: solver did not converge within --max-iter; "
                 "partial result written to %s\n",
                 cfg.output.c_str());
    return 3;
  }
  return 0;
}

int run_hdr(const CliConfig& cfg) {
  const RasterImage radiance = load_image(cfg.input);
  HdrParams hp = cfg.hdr;
  hp.base = cfg.iit;
  hp.exemplar_clahe = cfg.clahe;

  TransferResult result;
  if (cfg.exemplar.empty()) {
    result = hdr_compress_auto(radiance, hp);
  } else {
    RasterImage exemplar = load_exemplar(cfg.exemplar);
    if (exemplar.channels() == 3) exemplar = rgb_to_luminance(exemplar);
    result = hdr_compress(radiance, exemplar, hp);
  }
  save_image(cfg.output, result.image);
  if (!cfg.report.empty()) write_report(cfg.report, result.diagnostics);
  if (!result.diagnostics.all_converged) {
    std::fprintf(stderr,
                 "warning: solver did not converge within --max-iter; "
                 "partial result written to %s\n",
                 cfg.output.c_str());
    return 3;
  }
  return 0;
}

int run_clahe(const CliConfig& cfg) {
  const RasterImage img = load_image(cfg.input);
  save_image(cfg.output, clahe(img, cfg.clahe));
  return 0;
}

int run_remap(const CliConfig& cfg) {
  const RasterImage img = load_image(cfg.input);
  const AffinityMatrix K =
      build_gaussian_affinity(img.height(), img.width(), cfg.remap_kernel);
  const IntrinsicLayers layers = decompose_smooth(img, K, LogDomainParams{});
  RasterImage out = layer_remap(layers, cfg.remap);
  for (double& v : out.values()) v = std::clamp(v, 0.0, 1.0);
  save_image(cfg.output, out);
  return 0;
}

int run_verify(const CliConfig& cfg) {
  return oracle_battery(cfg.seed, std::cout) ? 0 : 2;
}

}  // namespace

CliConfig parse_args(const std::vector<std::string>& args) {
  CliConfig cfg;
  FlagState st;

  CLI::App app{"iit: optimization-based image illumination transfer"};
  app.require_subcommand(1);

  CLI::App* transfer = app.add_subcommand(
      "transfer", "Transfer the source structure onto an exemplar's illumination");
  attach_transfer_flags(transfer, cfg, st);

  CLI::App* hdr = app.add_subcommand(
      "hdr", "Compress HDR radiance to display range via a luminance transfer");
  attach_transfer_flags(hdr, cfg, st);
  hdr->add_option("--saturation", cfg.hdr.s_exponent,
                  "Saturation exponent in (0,1]")
      ->capture_default_str();

  CLI::App* clahe_cmd =
      app.add_subcommand("clahe", "Generate a CLAHE exemplar image");
  clahe_cmd->add_option("-i,--input", cfg.input, "Source image")->required();
  clahe_cmd->add_option("-o,--output", cfg.output, "Output image path")->required();
  clahe_cmd->add_option("--clip-limit", cfg.clahe.clip_limit, "Histogram clip limit")
      ->capture_default_str();
  clahe_cmd->add_option("--tiles", st.tiles, "Tile grid NxM")->capture_default_str();

  CLI::App* remap = app.add_subcommand(
      "remap", "Demonstrate global layer remapping on a smoothing-based split");
  remap->add_option("-i,--input", cfg.input, "Source image")->required();
  remap->add_option("-o,--output", cfg.output, "Output image path")->required();
  remap->add_option("--a", cfg.remap.a, "Additive illumination offset")
      ->capture_default_str();
  remap->add_option("--b", cfg.remap.b, "Illumination gain")->capture_default_str();
  remap->add_option("--c-gain", cfg.remap.c_gain, "Reflectance gain")
      ->capture_default_str();
  remap->add_option("--window", cfg.remap_kernel.window, "Split kernel window (odd)")
      ->capture_default_str();
  remap->add_option("--sigma-s", cfg.remap_kernel.sigma_s, "Split kernel sigma")
      ->capture_default_str();

  CLI::App* verify = app.add_subcommand(
      "verify", "Run the internal oracle battery and print pass/fail lines");
  verify->add_option("--seed", cfg.seed, "Random seed for the battery")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    throw HelpRequested("help");
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (transfer->parsed()) cfg.command = CliConfig::Command::transfer;
  if (hdr->parsed()) cfg.command = CliConfig::Command::hdr;
  if (clahe_cmd->parsed()) cfg.command = CliConfig::Command::clahe;
  if (remap->parsed()) cfg.command = CliConfig::Command::remap;
  if (verify->parsed()) cfg.command = CliConfig::Command::verify;

  if (cfg.command == CliConfig::Command::transfer ||
      cfg.command == CliConfig::Command::hdr)
    finalize_iit(cfg, st);
  if (cfg.command == CliConfig::Command::clahe) parse_tiles(st.tiles, cfg.clahe);
  return cfg;
}

int run(const CliConfig& cfg) {
  switch (cfg.command) {
    case CliConfig::Command::transfer:
      return run_transfer(cfg);
    case CliConfig::Command::hdr:
      return run_hdr(cfg);
    case CliConfig::Command::clahe:
      return run_clahe(cfg);
    case CliConfig::Command::remap:
      return run_remap(cfg);
    case CliConfig::Command::verify:
      return run_verify(cfg);
    case CliConfig::Command::none:
      break;
  }
  throw UsageError("no command selected");
}

int main_entry(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  CliConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequested&) {
    return 0;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  }
  try {
    return run(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace iit::cli
