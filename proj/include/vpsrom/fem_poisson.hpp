#pragma once

#include "vpsrom/types.hpp"

namespace vpsrom {

struct PeriodicMesh {
  double length = 0;  // |Omega_x|
  int nodes = 0;      // N_x
  double h = 0;

  double node(int i) const { return i * h; }
};

PeriodicMesh build_mesh(double domain_length, int num_nodes);

// Uniform macro-particles with weight |Omega_x|/N over a unit neutralizing
// background, so that q*sum(w) + background*|Omega_x| = 0 exactly.
struct ChargeConfig {
  double q = -1.0;
  double m = 1.0;
  double weight = 0.0;
  double background = 1.0;
  int num_particles = 0;

  double mp() const { return m * weight; }  // m_p
  double qw() const { return q * weight; }  // every entry of M_q
  Vec charge_vector() const { return Vec::Constant(num_particles, qw()); }
  bool neutral(double length, double tol = 1e-12) const;
};

ChargeConfig make_charge(const PeriodicMesh& mesh, int num_particles);

// Sparse particle-to-grid matrix with at most two entries per row: row l
// carries w_left at node left(l) and w_right at node (left(l)+1) mod N_x.
struct DepositMatrix {
  enum class Kind { basis, gradient };

  Kind kind = Kind::basis;
  int nx = 0;
  IVec left;
  Vec w_left, w_right;

  Eigen::Index rows() const { return left.size(); }
  int right(Eigen::Index l) const { return left(l) + 1 == nx ? 0 : left(l) + 1; }

  // row-wise product with a grid vector, (D*phi)_l
  Vec apply(const Vec& phi) const;
  // D^T * a, accumulated onto the grid
  Vec apply_transpose(const Vec& a) const;
  Mat to_dense() const;
};

DepositMatrix eval_basis(const PeriodicMesh& mesh, const Vec& positions);
DepositMatrix eval_basis_grad(const PeriodicMesh& mesh, const Vec& positions);

// rho = Lambda0^T M_q + background * mass_lumped
Vec deposit_charge(const DepositMatrix& basis, const ChargeConfig& charge,
                   const PeriodicMesh& mesh);

class PoissonOperator {
 public:
  explicit PoissonOperator(const PeriodicMesh& mesh);

  const PeriodicMesh& mesh() const { return mesh_; }
  const Mat& stiffness() const { return L_; }
  Vec mass_lumped() const { return Vec::Constant(mesh_.nodes, mesh_.h); }

  // zero-mean solution of L phi = rho - mean(rho)
  Vec solve(const Vec& rho) const;
  // same for every column
  Mat solve(const Mat& rho) const;

 private:
  PeriodicMesh mesh_;
  Mat L_;
  Mat pinv_;  // pseudo-inverse of L; N_x is small so dense is cheapest
};

PoissonOperator assemble_stiffness(const PeriodicMesh& mesh);

double electric_energy(const PoissonOperator& op, const Vec& phi, double mp);

// -m_p^{-1} diag(M_q) gradLambda0 phi, the acceleration of every particle
Vec electric_field_at_particles(const DepositMatrix& grad_basis, const Vec& phi,
                                const ChargeConfig& charge);

// Self-consistent potential of a set of positions.
Vec potential_of(const PoissonOperator& op, const ChargeConfig& charge,
                 const Vec& positions);

}  // namespace vpsrom
