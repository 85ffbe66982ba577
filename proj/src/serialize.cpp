#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "vpsrom/orchestrator.hpp"

namespace vpsrom {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ofstream open(const fs::path& p)
{
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
  os << std::setprecision(17);
  return os;
}

void close(std::ofstream& os, const fs::path& p)
{
  os.close();
  if (!os) throw std::runtime_error("error writing " + p.string());
}

void write_json(const json& j, const fs::path& p)
{
  std::ofstream os = open(p);
  os << j.dump(2) << '\n';
  close(os, p);
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// index of the sample of ts at time t at or after cursor, or -1
long find_time(const std::vector<double>& ts, std::size_t& cursor, double t)
{
  while (cursor < ts.size() && ts[cursor] < t - 1e-12) ++cursor;
  if (cursor < ts.size() && std::abs(ts[cursor] - t) <= 1e-12) return static_cast<long>(cursor);
  return -1;
}

void write_energies(const RunReport& r, const fs::path& p)
{
  const int np = static_cast<int>(r.params.rows());
  const bool fom = !r.fom_t.empty(), rom = !r.rom_t.empty();
  std::ofstream os = open(p);
  os << "time";
  if (fom || !rom)
    for (int i = 0; i < np; ++i) os << ",fom_" << i;
  if (rom || !fom)
    for (int i = 0; i < np; ++i) os << ",rom_" << i;
  os << '\n';
  // the time axis is the FOM one when present; ROM energies are left empty
  // where they were not evaluated
  const std::vector<double>& axis = fom ? r.fom_t : r.rom_t;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < axis.size(); ++k) {
    const double t = axis[k];
    os << t;
    if (fom)
      for (int i = 0; i < np; ++i) os << ',' << r.fom_energy[k](i);
    if (rom) {
      const long m = find_time(r.rom_t, cursor, t);
      for (int i = 0; i < np; ++i) {
        os << ',';
        if (m >= 0) os << r.rom_energy[m](i);
      }
    }
    os << '\n';
  }
  close(os, p);
}

void write_errors(const RunReport& r, const fs::path& p)
{
  std::ofstream os = open(p);
  os << "time,error_X,error_V,target_X,target_V\n";
  for (auto& e : r.errors)
    os << e.t << ',' << e.eX << ',' << e.eV << ',' << e.targetX << ',' << e.targetV << '\n';
  close(os, p);
}

void write_ranks(const RunReport& r, const fs::path& p)
{
  std::ofstream os = open(p);
  os << "time,rank_X,rank_V,rank_potential\n";
  for (auto& e : r.ranks) os << e.t << ',' << e.rankX << ',' << e.rankV << ',' << e.rankPhi << '\n';
  close(os, p);
}

void field(std::ostream& os, double v)
{
  os << ',';
  if (std::isfinite(v)) os << v;
}

void write_hamiltonian(const RunReport& r, const fs::path& p)
{
  std::ofstream os = open(p);
  os << "time,rel_error,dH,dH_Z,dH_Z_dd,ortho_residual,symp_residual\n";
  for (auto& h : r.hamiltonian) {
    os << h.t;
    for (double v : {h.rel_error, h.dH, h.dHZ, h.dHZdd, h.ortho, h.symp}) field(os, v);
    os << '\n';
  }
  close(os, p);
}

void write_timings(const RunReport& r, const fs::path& p)
{
  std::ofstream os = open(p);
  os << "phase,seconds,count,seconds_per_call\n";
  for (auto& [label, s] : r.timers.totals()) {
    const long c = r.timers.count(label);
    os << label << ',' << s << ',' << c << ',' << (c ? s / c : 0.0) << '\n';
  }
  close(os, p);
}

json rates_json(const RunReport& r)
{
  json arr = json::array();
  for (std::size_t i = 0; i < r.rates.size(); ++i) {
    const RateRecord& x = r.rates[i];
    arr.push_back({{"index", i},
                   {"alpha", r.params(i, 0)},
                   {"sigma", r.params(i, 1)},
                   {"fom_damping", num(x.fom_damping)},
                   {"fom_growth", num(x.fom_growth)},
                   {"rom_damping", num(x.rom_damping)},
                   {"rom_growth", num(x.rom_growth)}});
  }
  return {{"rates", arr}, {"notes", r.rate_notes}};
}

}  // namespace

json summary_json(const RunReport& report, const RunConfig& config)
{
  json s = json::object();
  for (auto& [k, v] : report.scalars()) s[k] = num(v);
  json j = {{"config", to_json(config)}, {"scalars", s}, {"subsample", report.subsample}};
  json notes = json::array();
  if (config.mode != RunMode::full && config.hyper_reduction && !report.hyper_reduction_engaged)
    notes.push_back("no hyper-reduction engaged");
  j["notes"] = notes;
  return j;
}

void serialize(const RunReport& report, const RunConfig& config, const std::string& dir)
{
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw std::runtime_error("cannot create " + root.string() + ": " + ec.message());
  write_json(to_json(config), root / "config.json");
  write_energies(report, root / "energies.csv");
  write_errors(report, root / "errors.csv");
  write_ranks(report, root / "ranks.csv");
  write_hamiltonian(report, root / "hamiltonian.csv");
  write_timings(report, root / "timings.csv");
  write_json(rates_json(report), root / "rates.json");
  write_json(summary_json(report, config), root / "summary.json");
}

}  // namespace vpsrom
