#include "vpsrom/pic.hpp"

#include <chrono>
#include <cmath>

#include "vpsrom/parallel.hpp"

namespace vpsrom {

FieldEval evaluate_field(const PoissonOperator& op, const ChargeConfig& charge, const Vec& X)
{
  const PeriodicMesh& mesh = op.mesh();
  DepositMatrix B = eval_basis(mesh, X);
  FieldEval f;
  f.phi = op.solve(deposit_charge(B, charge, mesh));
  f.energy = electric_energy(op, f.phi, charge.mp());
  // the gradient matrix shares the cell indices of the basis matrix
  const double c = -charge.qw() / charge.mp() / mesh.h;
  f.E.resize(X.size());
  for (Eigen::Index l = 0; l < X.size(); ++l)
    f.E(l) = c * (f.phi(B.right(l)) - f.phi(B.left(l)));
  return f;
}

double hamiltonian(const Vec& X, const Vec& V, const PoissonOperator& op,
                   const ChargeConfig& charge)
{
  return 0.5 * V.squaredNorm() + electric_energy(op, potential_of(op, charge, X), charge.mp());
}

ParticleEnsemble stormer_verlet_step(const ParticleEnsemble& ens, const PoissonOperator& op,
                                     double dt)
{
  if (!(dt > 0)) throw ConfigError("stormer_verlet_step: dt must be positive");
  ParticleEnsemble out = ens;
  for (Eigen::Index i = 0; i < ens.X.cols(); ++i) {
    Vec X = ens.X.col(i), V = ens.V.col(i);
    Vec E = evaluate_field(op, ens.charge, X).E;
    stormer_verlet(X, V, E, dt,
                   [&](const Vec& x) { return evaluate_field(op, ens.charge, x).E; });
    out.X.col(i) = X;
    out.V.col(i) = V;
  }
  out.t = ens.t + dt;
  return out;
}

FullOrderSolver::FullOrderSolver(ParticleEnsemble init, const PoissonOperator& op, int workers)
    : ens_(std::move(init)), op_(&op), workers_(workers)
{
  const int p = num_params();
  E_.resize(ens_.X.rows(), p);
  phi_.resize(op.mesh().nodes, p);
  energy_.resize(p);
  parallel_for(p, workers_, [&](int i) { refresh(i); });
}

void FullOrderSolver::refresh(int i)
{
  FieldEval f = evaluate_field(*op_, ens_.charge, ens_.X.col(i));
  E_.col(i) = f.E;
  phi_.col(i) = f.phi;
  energy_(i) = f.energy;
}

double FullOrderSolver::hamiltonian(int i) const
{
  return 0.5 * ens_.V.col(i).squaredNorm() + energy_(i);
}

void FullOrderSolver::step(double dt)
{
  auto t0 = std::chrono::steady_clock::now();
  const double tnew = ens_.t + dt;
  parallel_for(num_params(), workers_, [&](int i) {
    auto X = ens_.X.col(i);
    auto V = ens_.V.col(i);
    X += dt * (V + 0.5 * dt * E_.col(i));
    auto diverged = [&] {
      return DivergenceError("full-order state became non-finite for parameter " +
                             std::to_string(i) + " at t = " + std::to_string(tnew));
    };
    if (!X.allFinite()) throw diverged();
    FieldEval f = evaluate_field(*op_, ens_.charge, X);
    V += 0.5 * dt * (E_.col(i) + f.E);
    if (!V.allFinite()) throw diverged();
    E_.col(i) = f.E;
    phi_.col(i) = f.phi;
    energy_(i) = f.energy;
  });
  ens_.t = tnew;
  ++steps_;
  seconds_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int step_count(double dt, double t_final)
{
  if (!(dt > 0) || !(t_final > 0)) throw ConfigError("dt and t_final must be positive");
  return std::max(1, static_cast<int>(std::llround(t_final / dt)));
}

FullTrajectoryRecord run_full_order(const ParticleEnsemble& initial, const PoissonOperator& op,
                                    double dt, double t_final, const RecordOptions& rec,
                                    int workers)
{
  const int steps = step_count(dt, t_final);
  FullOrderSolver solver(initial, op, workers);
  FullTrajectoryRecord r;
  auto snap = [&](int tau) {
    if (rec.snapshot_stride > 0 && tau % rec.snapshot_stride == 0) {
      r.snapshot_times.push_back(solver.state().t);
      r.SX.push_back(solver.state().X);
      r.SV.push_back(solver.state().V);
    }
  };
  r.times.push_back(initial.t);
  r.energies.push_back(solver.energies());
  snap(0);
  for (int tau = 1; tau <= steps; ++tau) {
    solver.step(dt);
    r.times.push_back(solver.state().t);
    r.energies.push_back(solver.energies());
    snap(tau);
  }
  r.seconds = solver.seconds();
  r.seconds_per_param = r.seconds / std::max(1, solver.num_params());
  return r;
}

}  // namespace vpsrom
