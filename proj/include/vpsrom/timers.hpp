#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

namespace vpsrom {

// Wall-time accumulators per labelled phase. Phases nest: entering an inner
// phase pauses the outer one, so every accumulator holds exclusive time.
class PhaseTimers {
 public:
  using clock = std::chrono::steady_clock;

  void start(const std::string& label);
  void stop();

  double total(const std::string& label) const;
  long count(const std::string& label) const;
  const std::map<std::string, double>& totals() const { return totals_; }
  void merge(const PhaseTimers& other);
  void reset();

  class Scope {
   public:
    Scope(PhaseTimers* t, const std::string& label) : t_(t)
    {
      if (t_) t_->start(label);
    }
    ~Scope()
    {
      if (t_) t_->stop();
    }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    PhaseTimers* t_;
  };

 private:
  void charge_top(clock::time_point now);

  std::map<std::string, double> totals_;
  std::map<std::string, long> counts_;
  std::vector<std::string> stack_;
  clock::time_point mark_;
};

// The labels used by the solvers.
namespace phase {
inline const std::string fom_step = "fom_step";
inline const std::string rom_basis = "rom_basis";
inline const std::string rom_coeff = "rom_coeff";
inline const std::string dmd_fit = "dmd_fit";
inline const std::string deim_fit = "deim_fit";
}  // namespace phase

}  // namespace vpsrom
