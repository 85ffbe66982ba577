#pragma once

#include <vector>

#include "vpsrom/fem_poisson.hpp"
#include "vpsrom/sampling.hpp"

namespace vpsrom {

// Field, potential and electric energy of one particle configuration.
struct FieldEval {
  Vec E;    // acceleration per particle
  Vec phi;  // zero-mean potential on the grid
  double energy = 0;
};

FieldEval evaluate_field(const PoissonOperator& op, const ChargeConfig& charge, const Vec& X);

// H(W) = 1/2 V^T V + electric energy at the self-consistent potential of X
double hamiltonian(const Vec& X, const Vec& V, const PoissonOperator& op,
                   const ChargeConfig& charge);

// One Stormer-Verlet step for a single parameter. E holds the field at X on
// entry and at the new X on exit, so consecutive steps cost one field
// evaluation each. field(X) must return the acceleration at X.
template <class Field>
void stormer_verlet(Vec& X, Vec& V, Vec& E, double dt, Field&& field)
{
  X += dt * (V + 0.5 * dt * E);
  Vec Enew = field(X);
  V += 0.5 * dt * (E + Enew);
  E = std::move(Enew);
}

// Pure single step on every column; recomputes the starting field.
ParticleEnsemble stormer_verlet_step(const ParticleEnsemble& ens, const PoissonOperator& op,
                                     double dt);

// Batch driver that keeps the field cache between steps.
class FullOrderSolver {
 public:
  FullOrderSolver(ParticleEnsemble init, const PoissonOperator& op, int workers = 1);

  void step(double dt);

  const ParticleEnsemble& state() const { return ens_; }
  int num_params() const { return static_cast<int>(ens_.X.cols()); }
  // electric energies and potentials at the current state
  const Vec& energies() const { return energy_; }
  const Mat& potentials() const { return phi_; }
  double hamiltonian(int i) const;
  // wall seconds spent in step(), summed over calls
  double seconds() const { return seconds_; }
  long steps_taken() const { return steps_; }

 private:
  void refresh(int i);

  ParticleEnsemble ens_;
  const PoissonOperator* op_;
  int workers_;
  Mat E_, phi_;
  Vec energy_;
  double seconds_ = 0;
  long steps_ = 0;
};

struct RecordOptions {
  int snapshot_stride = 10;  // 0 disables snapshots
};

struct FullTrajectoryRecord {
  std::vector<double> times;
  std::vector<Vec> energies;  // one length-p vector per recorded time
  std::vector<double> snapshot_times;
  std::vector<Mat> SX, SV;
  double seconds = 0;
  double seconds_per_param = 0;
};

int step_count(double dt, double t_final);

FullTrajectoryRecord run_full_order(const ParticleEnsemble& initial, const PoissonOperator& op,
                                    double dt, double t_final, const RecordOptions& rec = {},
                                    int workers = 1);

}  // namespace vpsrom
