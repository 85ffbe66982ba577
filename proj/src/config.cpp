#include "vpsrom/config.hpp"

#include <cmath>
#include <fstream>

namespace vpsrom {

using nlohmann::json;

std::string to_string(RunMode m)
{
  switch (m) {
    case RunMode::full: return "full";
    case RunMode::rom: return "rom";
    case RunMode::compare: return "compare";
  }
  return "unknown";
}

RunMode mode_from_string(const std::string& s)
{
  if (s == "full") return RunMode::full;
  if (s == "rom") return RunMode::rom;
  if (s == "compare") return RunMode::compare;
  throw ConfigError("unknown mode '" + s + "'");
}

void RunConfig::validate() const
{
  spec.validate();
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (!(svd_tol_dmd > 0) || !(fp_tol > 0) || fp_max_iter < 1 || !(fp_stall_tol >= 0))
    throw ConfigError("tolerances must be positive");
  if (!(deim_amplification_limit >= 1))
    throw ConfigError("deim_amplification_limit must be at least 1");
  if (record_stride < 1 || energy_stride < 1) throw ConfigError("strides must be >= 1");
  if (!(rank_tol > 0 && rank_tol < 1)) throw ConfigError("rank_tol must lie in (0,1)");
  if (static_cast<int>(extra_params.size()) > spec.p)
    throw ConfigError("more extra parameters than p");
  for (auto& e : extra_params)
    if (!spec.gamma.contains(e[0], e[1]))
      throw ConfigError("extra parameter outside the parameter box");
  if (mode != RunMode::full && spec.p_star < spec.n)
    throw ConfigError("p* must be at least n for S(Z) to be invertible");
}

RunConfig default_config(BenchmarkKind kind)
{
  RunConfig c;
  c.spec = benchmark_defaults(kind);
  switch (kind) {
    case BenchmarkKind::weak_landau:
      // later peaks of a desk-scale run sit on the loading-noise floor
      c.damping_window = {0.0, 10.0};
      break;
    case BenchmarkKind::nonlinear_landau:
      c.damping_window = {0.0, 15.0};
      c.growth_window = {20.0, 40.0};
      break;
    case BenchmarkKind::two_stream:
      c.growth_window = {0.0, c.spec.t_final};
      break;
  }
  return c;
}

namespace {

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double null_or_num(const json& j) { return j.is_null() ? NAN : j.get<double>(); }

json window(const std::array<double, 2>& w) { return {num_or_null(w[0]), num_or_null(w[1])}; }
std::array<double, 2> window(const json& j) { return {null_or_num(j.at(0)), null_or_num(j.at(1))}; }

}  // namespace

json to_json(const RunConfig& c)
{
  const BenchmarkSpec& s = c.spec;
  json extra = json::array();
  for (auto& e : c.extra_params) extra.push_back({e[0], e[1]});
  return {
      {"benchmark", to_string(s.kind)},
      {"mode", to_string(c.mode)},
      {"problem",
       {{"k", s.k},
        {"v0", s.v0},
        {"gamma", {s.gamma.alpha_lo, s.gamma.alpha_hi, s.gamma.sigma_lo, s.gamma.sigma_hi}},
        {"N", s.N},
        {"Nx", s.Nx},
        {"dt", s.dt},
        {"t_final", s.t_final},
        {"p", s.p},
        {"extra_params", extra}}},
      {"reduction",
       {{"n", s.n},
        {"p_star", s.p_star},
        {"T", s.T},
        {"d", s.d},
        {"k_deim", s.k_deim},
        {"n_update", s.n_update},
        {"svd_tol_dmd", c.svd_tol_dmd},
        {"deim_rank_tol", c.deim_rank_tol},
        {"fp_tol", c.fp_tol},
        {"fp_max_iter", c.fp_max_iter},
        {"fp_stall_tol", c.fp_stall_tol},
        {"hyper_reduction", c.hyper_reduction},
        {"printed_subsample", c.printed_subsample},
        {"printed_rotation", c.printed_rotation},
        {"deim_amplification_limit", c.deim_amplification_limit}}},
      {"diagnostics",
       {{"record_stride", c.record_stride},
        {"energy_stride", c.energy_stride},
        {"rank_tol", c.rank_tol},
        {"hamiltonian_split", c.hamiltonian_split},
        {"state_diagnostics", c.state_diagnostics},
        {"damping_window", window(c.damping_window)},
        {"growth_window", window(c.growth_window)}}},
      {"run", {{"workers", c.workers}, {"output", c.output_dir}}},
  };
}

RunConfig config_from_json(const json& j)
{
  RunConfig c = default_config(benchmark_from_string(j.value("benchmark", "weak_landau")));
  BenchmarkSpec& s = c.spec;
  try {
    if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("problem")) {
      const json& p = j.at("problem");
      s.k = p.value("k", s.k);
      s.v0 = p.value("v0", s.v0);
      if (p.contains("gamma")) {
        auto g = p.at("gamma").get<std::vector<double>>();
        if (g.size() != 4) throw ConfigError("gamma must be [alpha_lo, alpha_hi, sigma_lo, sigma_hi]");
        s.gamma = {g[0], g[1], g[2], g[3]};
      }
      s.N = p.value("N", s.N);
      s.Nx = p.value("Nx", s.Nx);
      s.dt = p.value("dt", s.dt);
      s.t_final = p.value("t_final", s.t_final);
      s.p = p.value("p", s.p);
      if (p.contains("extra_params"))
        for (auto& e : p.at("extra_params")) c.extra_params.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    }
    if (j.contains("reduction")) {
      const json& r = j.at("reduction");
      s.n = r.value("n", s.n);
      s.p_star = r.value("p_star", s.p_star);
      s.T = r.value("T", s.T);
      s.d = r.value("d", s.d);
      s.k_deim = r.value("k_deim", s.k_deim);
      s.n_update = r.value("n_update", s.n_update);
      c.svd_tol_dmd = r.value("svd_tol_dmd", c.svd_tol_dmd);
      c.deim_rank_tol = r.value("deim_rank_tol", c.deim_rank_tol);
      c.fp_tol = r.value("fp_tol", c.fp_tol);
      c.fp_max_iter = r.value("fp_max_iter", c.fp_max_iter);
      c.fp_stall_tol = r.value("fp_stall_tol", c.fp_stall_tol);
      c.hyper_reduction = r.value("hyper_reduction", c.hyper_reduction);
      c.printed_subsample = r.value("printed_subsample", c.printed_subsample);
      c.printed_rotation = r.value("printed_rotation", c.printed_rotation);
      c.deim_amplification_limit = r.value("deim_amplification_limit", c.deim_amplification_limit);
    }
    if (j.contains("diagnostics")) {
      const json& d = j.at("diagnostics");
      c.record_stride = d.value("record_stride", c.record_stride);
      c.energy_stride = d.value("energy_stride", c.energy_stride);
      c.rank_tol = d.value("rank_tol", c.rank_tol);
      c.hamiltonian_split = d.value("hamiltonian_split", c.hamiltonian_split);
      c.state_diagnostics = d.value("state_diagnostics", c.state_diagnostics);
      if (d.contains("damping_window")) c.damping_window = window(d.at("damping_window"));
      if (d.contains("growth_window")) c.growth_window = window(d.at("growth_window"));
    }
    if (j.contains("run")) {
      const json& r = j.at("run");
      c.workers = r.value("workers", c.workers);
      c.output_dir = r.value("output", c.output_dir);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_override(json& j, const std::string& assignment)
{
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  auto dot = key.find('.');
  if (dot != std::string::npos) {
    j[key.substr(0, dot)][key.substr(dot + 1)] = value;
    return;
  }
  if (key == "benchmark" || key == "mode") {
    j[key] = value;
    return;
  }
  for (const char* sec : {"problem", "reduction", "diagnostics", "run"}) {
    if (j.contains(sec) && j[sec].contains(key)) {
      j[sec][key] = value;
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace vpsrom
