#include "vpsrom/orchestrator.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "vpsrom/diagnostics.hpp"
#include "vpsrom/hyperreduction.hpp"
#include "vpsrom/parallel.hpp"
#include "vpsrom/pic.hpp"
#include "vpsrom/symplectic.hpp"

namespace vpsrom {

namespace {

const std::string rom_basis_warmup = "rom_basis_warmup";
const std::string rom_coeff_warmup = "rom_coeff_warmup";

Mat build_params(const RunConfig& c)
{
  const int extra = static_cast<int>(c.extra_params.size());
  const int ns = c.spec.p - extra;
  Mat P(c.spec.p, 2);
  if (ns > 0) P.topRows(ns) = sample_parameters(c.spec.gamma, ns);
  for (int j = 0; j < extra; ++j) P.row(ns + j) << c.extra_params[j][0], c.extra_params[j][1];
  return P;
}

Mat unit_params(const Mat& P, const ParamBox& g)
{
  Mat U(P.rows(), 2);
  const double wa = g.alpha_hi - g.alpha_lo, ws = g.sigma_hi - g.sigma_lo;
  U.col(0) = wa > 0 ? Vec((P.col(0).array() - g.alpha_lo) / wa) : Vec::Zero(P.rows());
  U.col(1) = ws > 0 ? Vec((P.col(1).array() - g.sigma_lo) / ws) : Vec::Zero(P.rows());
  return U;
}

// Electric energies and Hamiltonians of the reconstructions U Z.
void rom_energies(const PoissonOperator& op, const ChargeConfig& charge, const Mat& U,
                  const Mat& Z, int workers, Vec& energy, Vec& H)
{
  const Eigen::Index N = U.rows() / 2;
  const int p = static_cast<int>(Z.cols());
  energy.resize(p);
  H.resize(p);
  Mat X = U.topRows(N) * Z, V = U.bottomRows(N) * Z;
  parallel_for(p, workers, [&](int i) {
    energy(i) = electric_energy(op, potential_of(op, charge, X.col(i)), charge.mp());
    H(i) = 0.5 * V.col(i).squaredNorm() + energy(i);
  });
}

class RomDriver {
 public:
  RomDriver(const RunConfig& c, const PoissonOperator& op, const ParticleEnsemble& init,
            const Mat& params, RunReport& rep)
      : c_(c),
        op_(op),
        charge_(init.charge),
        rep_(rep),
        hr_(c.spec.p_star, c.spec.N, op.mesh(), init.charge, hr_options(c)),
        params_unit_(unit_params(params, c.spec.gamma))
  {
    CsvdBasis b = complex_svd_basis(init.X, init.V, c.spec.n);
    s_.U = std::move(b.U);
    s_.Z = std::move(b.Z);
    s_.t = init.t;
    sub_ = select_parameter_subset(s_.Z, c.spec.p_star, c.printed_subsample);
    all_.resize(c.spec.p);
    for (int i = 0; i < c.spec.p; ++i) all_[i] = i;
    sub_pos_.assign(c.spec.p, -1);
    for (std::size_t j = 0; j < sub_.size(); ++j) sub_pos_[sub_[j]] = static_cast<int>(j);
    rep_.subsample = sub_;
    ortho_ = orthogonality_residual(s_.U);
    symp_ = symplecticity_residual(s_.U);
    rep_.max_ortho = ortho_;
    rep_.max_symp = symp_;
  }

  static HyperReductionOptions hr_options(const RunConfig& c)
  {
    HyperReductionOptions o;
    o.T = c.spec.T;
    o.d = c.spec.d;
    o.svd_tol = c.svd_tol_dmd;
    o.deim_rank_tol = c.deim_rank_tol;
    o.deim = {c.spec.n_update, c.spec.k_deim, c.printed_rotation, c.deim_amplification_limit};
    return o;
  }

  const ReducedState& state() const { return s_; }
  const Prk2Result& last() const { return last_; }
  const ReducedState& previous() const { return prev_; }
  bool last_warm() const { return warm_; }
  const HyperReducer& reducer() const { return hr_; }

  void step()
  {
    ++tau_;
    const double dt = c_.spec.dt;
    const bool hyper = c_.hyper_reduction;
    warm_ = !hyper || tau_ <= c_.spec.T;
    // warm-up evolves the basis with every parameter; afterwards only the subsample
    const std::vector<int>& cur = hyper && tau_ <= c_.spec.T ? all_ : sub_;
    const double t_prev = s_.t;

    auto gradients = [&](const Mat& U, const Mat& Zs, int stage) -> Mat {
      const int m = static_cast<int>(Zs.cols());
      Mat G(U.rows(), m);
      std::vector<FullGradient> fg(m);
      parallel_for(m, c_.workers, [&](int j) {
        fg[j] = full_gradient(U, Zs.col(j), op_, charge_);
        G.col(j) = fg[j].G;
      });
      if (stage == 0 && hyper) {
        for (int j = 0; j < m; ++j)
          if (int pos = sub_pos_[cur[j]]; pos >= 0) hr_.push(pos, fg[j].phi, fg[j].basis);
        if (!warm_) hr_.fit(t_prev, dt, params_unit_, sub_, &rep_.timers);
      }
      return G;
    };

    Prk2Options opt;
    opt.fp = {c_.fp_tol, c_.fp_max_iter, c_.fp_stall_tol};
    opt.workers = c_.workers;
    opt.timers = &rep_.timers;
    opt.basis_label = warm_ && hyper ? rom_basis_warmup : phase::rom_basis;
    opt.coeff_label = warm_ && hyper ? rom_coeff_warmup : phase::rom_coeff;

    prev_ = s_;
    if (warm_) {
      FullCoefficientField field(op_, charge_);
      last_ = prk2_step(s_, dt, cur, gradients, field, opt);
    } else {
      HyperReducedField field(hr_.dmd(), hr_.deim(), op_.mesh(), charge_);
      last_ = prk2_step(s_, dt, cur, gradients, field, opt);
      rep_.max_imag_ratio = std::max(rep_.max_imag_ratio, field.max_imag_ratio());
      const int r = hr_.dmd().rank();
      rep_.dmd_rank_min = rep_.dmd_rank_min ? std::min(rep_.dmd_rank_min, r) : r;
      rep_.dmd_rank_max = std::max(rep_.dmd_rank_max, r);
      rep_.deim_d = hr_.deim().d();
      rep_.deim_full_rebuilds = hr_.deim().full_rebuilds;
      rep_.hyper_reduction_engaged = true;
    }
    s_ = last_.next;
    if (warm_) ++rep_.warmup_steps;

    rep_.fp_iterations_max = std::max(rep_.fp_iterations_max, last_.fp_iterations_max);
    rep_.fp_iterations_mean += last_.fp_iterations_mean;
    rep_.fp_stalled += last_.fp_stalled;
    if (last_.near_singular) ++rep_.near_singular_steps;

    const double o = orthogonality_residual(s_.U), sp = symplecticity_residual(s_.U);
    rep_.max_step_ortho = std::max(rep_.max_step_ortho, std::abs(o - ortho_));
    rep_.max_step_symp = std::max(rep_.max_step_symp, std::abs(sp - symp_));
    rep_.max_ortho = std::max(rep_.max_ortho, o);
    rep_.max_symp = std::max(rep_.max_symp, sp);
    ortho_ = o;
    symp_ = sp;
    if (!s_.U.allFinite() || !s_.Z.allFinite())
      throw DivergenceError("reduced state became non-finite at t = " + std::to_string(s_.t));
  }

  // the three step-change terms of the Hamiltonian for the step just taken
  HamiltonianSplit split() const
  {
    auto H = [&](const Mat& U, const Vec& z, int) {
      const Eigen::Index N = U.rows() / 2;
      return 0.5 * (U.bottomRows(N) * z).squaredNorm() +
             electric_energy(op_, potential_of(op_, charge_, U.topRows(N) * z), charge_.mp());
    };
    HddFn Hdd;
    if (!warm_)
      Hdd = [&](const Vec& z, int i, double t) {
        return hyperreduced_hamiltonian(last_.U_half, z, dmd_extrapolate(hr_.dmd(), i, t),
                                        hr_.deim(), op_.mesh(), charge_);
      };
    return hamiltonian_error_decomposition(prev_.U, last_.U_half, s_.U, prev_.Z, s_.Z, prev_.t,
                                           s_.t, H, Hdd);
  }

  double ortho() const { return ortho_; }
  double symp() const { return symp_; }

 private:
  const RunConfig& c_;
  const PoissonOperator& op_;
  ChargeConfig charge_;
  RunReport& rep_;
  HyperReducer hr_;
  Mat params_unit_;
  ReducedState s_, prev_;
  Prk2Result last_;
  std::vector<int> sub_, all_, sub_pos_;
  int tau_ = 0;
  bool warm_ = true;
  double ortho_ = 0, symp_ = 0;
};

void fit_rates(const RunConfig& c, RunReport& rep)
{
  const int p = static_cast<int>(rep.params.rows());
  rep.rates.assign(p, {});
  auto series = [](const std::vector<Vec>& E, int i) {
    std::vector<double> s(E.size());
    for (std::size_t k = 0; k < E.size(); ++k) s[k] = E[k](i);
    return s;
  };
  auto fit = [&](const std::vector<double>& t, const std::vector<double>& e,
                 const std::array<double, 2>& w, RateMode mode, const char* what, int i) -> double {
    if (!std::isfinite(w[0]) || !std::isfinite(w[1]) || t.empty()) return NAN;
    try {
      return fit_energy_rate(t, e, mode, w[0], w[1]).rate;
    } catch (const RateFitError& err) {
      rep.rate_notes.push_back(std::string(what) + " parameter " + std::to_string(i) + ": " +
                               err.what());
      return NAN;
    }
  };
  for (int i = 0; i < p; ++i) {
    RateRecord& r = rep.rates[i];
    if (!rep.fom_energy.empty()) {
      auto e = series(rep.fom_energy, i);
      r.fom_damping = fit(rep.fom_t, e, c.damping_window, RateMode::damping, "fom damping", i);
      r.fom_growth = fit(rep.fom_t, e, c.growth_window, RateMode::growth, "fom growth", i);
    }
    if (!rep.rom_energy.empty()) {
      auto e = series(rep.rom_energy, i);
      r.rom_damping = fit(rep.rom_t, e, c.damping_window, RateMode::damping, "rom damping", i);
      r.rom_growth = fit(rep.rom_t, e, c.growth_window, RateMode::growth, "rom growth", i);
    }
  }
}

}  // namespace

RunReport run(const RunConfig& config)
{
  config.validate();
  const BenchmarkSpec& spec = config.spec;
  RunReport rep;
  rep.params = build_params(config);
  const PeriodicMesh mesh = build_mesh(spec.domain_length(), spec.Nx);
  const PoissonOperator op(mesh);
  const ParticleEnsemble init = build_initial_ensemble(spec, rep.params);
  const int steps = step_count(spec.dt, spec.t_final);
  rep.steps = steps;
  const bool with_fom = config.mode != RunMode::rom;
  const bool with_rom = config.mode != RunMode::full;
  const int W = config.workers;

  std::unique_ptr<FullOrderSolver> fom;
  if (with_fom) fom = std::make_unique<FullOrderSolver>(init, op, W);
  std::unique_ptr<RomDriver> rom;
  if (with_rom) rom = std::make_unique<RomDriver>(config, op, init, rep.params, rep);

  Vec Hfom(spec.p), Erom, Hrom;
  auto record = [&](int tau) {
    const double t = init.t + tau * spec.dt;
    if (fom) {
      rep.fom_t.push_back(t);
      rep.fom_energy.push_back(fom->energies());
    }
    const bool full_record = tau % config.record_stride == 0 || tau == steps;
    if (rom && (tau % config.energy_stride == 0 || full_record)) {
      rom_energies(op, init.charge, rom->state().U, rom->state().Z, W, Erom, Hrom);
      rep.rom_t.push_back(t);
      rep.rom_energy.push_back(Erom);
    }
    if (!full_record) return;

    if (config.state_diagnostics && fom) {
      const Mat& SX = fom->state().X;
      const Mat& SV = fom->state().V;
      RankRecord rr{t, numerical_rank(SX, config.rank_tol), numerical_rank(SV, config.rank_tol),
                    numerical_rank(fom->potentials(), config.rank_tol)};
      rep.ranks.push_back(rr);
      if (rom) {
        const Eigen::Index N = rom->state().N();
        StateErrors e = relative_errors(SX, SV, rom->state().U.topRows(N) * rom->state().Z,
                                        rom->state().U.bottomRows(N) * rom->state().Z);
        StateErrors tg = target_projection_errors(SX, SV, spec.n);
        rep.errors.push_back({t, e.X, e.V, tg.X, tg.V});
      }
    }
    if (rom) {
      HamiltonianRecord h{t, NAN, NAN, NAN, NAN, rom->ortho(), rom->symp()};
      if (fom) {
        for (int i = 0; i < spec.p; ++i) Hfom(i) = fom->hamiltonian(i);
        h.rel_error = hamiltonian_relative_error(Hfom, Hrom);
      }
      if (config.hamiltonian_split && tau > 0) {
        HamiltonianSplit sp = rom->split();
        h.dH = sp.dH;
        h.dHZ = sp.dHZ;
        h.dHZdd = sp.dHZdd;
      }
      rep.hamiltonian.push_back(h);
    }
  };

  record(0);
  for (int tau = 1; tau <= steps; ++tau) {
    try {
      if (fom) {
        PhaseTimers::Scope sc(&rep.timers, phase::fom_step);
        fom->step(spec.dt);
      }
      if (rom) rom->step();
    } catch (const std::exception& e) {
      throw std::runtime_error("step " + std::to_string(tau) + " (t = " +
                               std::to_string(init.t + tau * spec.dt) + "): " + e.what());
    }
    record(tau);
  }
  if (rom) {
    rep.fp_iterations_mean /= std::max(1, steps);
    if (config.hyper_reduction && !rep.hyper_reduction_engaged)
      spdlog::warn("the run ended inside the warm-up window; no hyper-reduction engaged");
  }
  fit_rates(config, rep);
  return rep;
}

std::map<std::string, double> RunReport::scalars() const
{
  std::map<std::string, double> s;
  s["steps"] = steps;
  s["warmup_steps"] = warmup_steps;
  s["hyper_reduction_engaged"] = hyper_reduction_engaged;
  s["max_ortho_residual"] = max_ortho;
  s["max_symp_residual"] = max_symp;
  s["max_step_ortho_change"] = max_step_ortho;
  s["max_step_symp_change"] = max_step_symp;
  s["fp_iterations_max"] = fp_iterations_max;
  s["fp_iterations_mean"] = fp_iterations_mean;
  s["fp_stalled"] = fp_stalled;
  s["near_singular_steps"] = near_singular_steps;
  s["max_dmd_imag_ratio"] = max_imag_ratio;
  s["dmd_rank_min"] = dmd_rank_min;
  s["dmd_rank_max"] = dmd_rank_max;
  s["deim_d"] = deim_d;
  s["deim_full_rebuilds"] = deim_full_rebuilds;

  double hmax = NAN, hlast = NAN;
  for (auto& h : hamiltonian)
    if (std::isfinite(h.rel_error)) {
      hmax = std::isfinite(hmax) ? std::max(hmax, h.rel_error) : h.rel_error;
      hlast = h.rel_error;
    }
  s["max_hamiltonian_rel_error"] = hmax;
  s["final_hamiltonian_rel_error"] = hlast;

  double ratio_x = 0, ratio_v = 0, ex = 0, ev = 0;
  for (auto& e : errors) {
    ex = std::max(ex, e.eX);
    ev = std::max(ev, e.eV);
    if (e.targetX > 0) ratio_x = std::max(ratio_x, e.eX / e.targetX);
    if (e.targetV > 0) ratio_v = std::max(ratio_v, e.eV / e.targetV);
  }
  s["max_error_X"] = ex;
  s["max_error_V"] = ev;
  s["max_error_target_ratio_X"] = ratio_x;
  s["max_error_target_ratio_V"] = ratio_v;

  int rmax = 0;
  for (auto& r : ranks) rmax = std::max(rmax, r.rankPhi);
  s["max_rank_potential"] = rmax;

  for (auto& [k, v] : timers.totals()) {
    s["time_" + k] = v;
    s["count_" + k] = static_cast<double>(timers.count(k));
  }
  return s;
}

}  // namespace vpsrom
