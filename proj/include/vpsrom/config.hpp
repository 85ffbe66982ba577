#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "vpsrom/sampling.hpp"

namespace vpsrom {

enum class RunMode { full, rom, compare };

std::string to_string(RunMode m);
RunMode mode_from_string(const std::string& s);

struct RunConfig {
  BenchmarkSpec spec;
  RunMode mode = RunMode::compare;
  std::string output_dir = "vpsrom_out";
  int workers = 1;

  // parameters appended to the p - extra.size() Hammersley samples
  std::vector<std::array<double, 2>> extra_params;

  // reduction
  double svd_tol_dmd = 1e-5;
  double deim_rank_tol = 1e-10;
  double fp_tol = 1e-9;
  int fp_max_iter = 100;
  double fp_stall_tol = 1e-2;  // 0 turns a cycling implicit stage into an error
  bool hyper_reduction = true;
  bool printed_subsample = false;  // isolation score instead of farthest point
  bool printed_rotation = false;   // update the most aligned DEIM vectors
  double deim_amplification_limit = 10;

  // diagnostics
  int record_stride = 20;  // state errors, targets, ranks, Hamiltonians
  int energy_stride = 5;   // ROM electric energies
  double rank_tol = 1e-4;
  bool hamiltonian_split = true;
  bool state_diagnostics = true;  // errors, targets and ranks
  std::array<double, 2> damping_window{NAN, NAN};
  std::array<double, 2> growth_window{NAN, NAN};

  void validate() const;
};

RunConfig default_config(BenchmarkKind kind);

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// key=value where key is "section.name" or a bare name; the value is parsed
// as JSON and falls back to a plain string
void apply_override(nlohmann::json& j, const std::string& assignment);

}  // namespace vpsrom
