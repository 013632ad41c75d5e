#include "iit/report.hpp"

#include <fstream>

namespace iit {

namespace {

const char* kernel_name(KernelType t) {
  return t == KernelType::gaussian ? "gaussian" : "bilateral";
}
const char* domain_name(DomainMode d) {
  return d == DomainMode::log ? "log" : "linear";
}
const char* channel_mode_name(ChannelMode m) {
  return m == ChannelMode::per_channel ? "per-channel" : "luminance";
}
const char* preconditioner_name(Preconditioner p) {
  return p == Preconditioner::jacobi ? "jacobi" : "none";
}

nlohmann::json energy_json(const EnergyBreakdown& e) {
  return {{"total", e.total},
          {"illumination", e.illumination},
          {"reflectance", e.reflectance},
          {"content", e.content}};
}

}  // namespace

nlohmann::json run_report(const TransferDiagnostics& diag) {
  const IitParams& p = diag.params;
  nlohmann::json params = {
      {"alpha", p.alpha},
      {"beta", p.beta},
      {"gamma", p.gamma},
      {"kernel", kernel_name(p.kernel_type)},
      {"window", p.kernel.window},
      {"sigma_s", p.kernel.sigma_s},
      {"lle_window", p.lle.window},
      {"lle_eps", p.lle.epsilon},
      {"lle_feature_dim", p.lle.feature_dim},
      {"domain", domain_name(p.domain)},
      {"channel_mode", channel_mode_name(p.channel_mode)},
      {"epsilon_floor", p.log_domain.epsilon_floor},
      {"solver",
       {{"rel_tol", p.solver.rel_tol},
        {"max_iter", p.solver.max_iter},
        {"preconditioner", preconditioner_name(p.solver.preconditioner)}}},
  };
  if (p.kernel.sigma_r) params["sigma_r"] = *p.kernel.sigma_r;

  nlohmann::json planes = nlohmann::json::array();
  for (const auto& pd : diag.planes) {
    planes.push_back({
        {"plane", pd.plane},
        {"energy_source", energy_json(pd.energy_source)},
        {"energy_exemplar", energy_json(pd.energy_exemplar)},
        {"energy_output", energy_json(pd.energy_output)},
        {"solver",
         {{"iterations", pd.solve.iterations},
          {"final_rel_residual", pd.solve.final_rel_residual},
          {"converged", pd.solve.converged},
          {"wall_time_s", pd.solve.wall_time_s}}},
    });
  }

  return {{"schema", 1},
          {"parameters", params},
          {"planes", planes},
          {"clamped_pixels", diag.clamped_pixels},
          {"all_converged", diag.all_converged},
          {"timings", {{"total_s", diag.total_time_s}}}};
}

void write_report(const std::string& path, const TransferDiagnostics& diag) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open report file: " + path);
  out << run_report(diag).dump(2) << '\n';
  if (!out) throw IoError("failed writing report file: " + path);
}

}  // namespace iit
