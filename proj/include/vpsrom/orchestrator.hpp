#pragma once

#include <map>
#include <string>
#include <vector>

#include "vpsrom/config.hpp"
#include "vpsrom/timers.hpp"
#include "vpsrom/types.hpp"

namespace vpsrom {

struct ErrorRecord {
  double t;
  double eX, eV, targetX, targetV;
};

struct RankRecord {
  double t;
  int rankX, rankV, rankPhi;
};

struct HamiltonianRecord {
  double t;
  double rel_error;        // ||H_FOM - H_ROM|| / ||H_FOM||, NaN outside compare mode
  double dH, dHZ, dHZdd;   // NaN when not evaluated
  double ortho, symp;      // orthosymplecticity residuals of U
};

struct RateRecord {
  double fom_damping = NAN, fom_growth = NAN;
  double rom_damping = NAN, rom_growth = NAN;
};

struct RunReport {
  Mat params;  // p x 2

  std::vector<double> fom_t;
  std::vector<Vec> fom_energy;
  std::vector<double> rom_t;
  std::vector<Vec> rom_energy;

  std::vector<ErrorRecord> errors;
  std::vector<RankRecord> ranks;
  std::vector<HamiltonianRecord> hamiltonian;
  std::vector<RateRecord> rates;
  std::vector<std::string> rate_notes;

  PhaseTimers timers;
  int steps = 0;
  int warmup_steps = 0;
  bool hyper_reduction_engaged = false;

  // per-step structure monitors, gathered on every ROM step
  double max_ortho = 0, max_symp = 0;            // largest residual of any U_tau
  double max_step_ortho = 0, max_step_symp = 0;  // largest change over one step
  int fp_iterations_max = 0;
  double fp_iterations_mean = 0;
  int fp_stalled = 0;  // implicit stages accepted at a bounded cycle
  int near_singular_steps = 0;
  double max_imag_ratio = 0;
  int dmd_rank_min = 0, dmd_rank_max = 0;
  int deim_d = 0, deim_full_rebuilds = 0;
  std::vector<int> subsample;

  std::map<std::string, double> scalars() const;
};

RunReport run(const RunConfig& config);

// Writes config.json, energies.csv, errors.csv, ranks.csv, hamiltonian.csv,
// timings.csv, rates.json and summary.json into dir.
void serialize(const RunReport& report, const RunConfig& config, const std::string& dir);

// the summary.json document: config echo, scalars(), subsample and notes
nlohmann::json summary_json(const RunReport& report, const RunConfig& config);

}  // namespace vpsrom
