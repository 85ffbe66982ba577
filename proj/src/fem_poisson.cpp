#include "vpsrom/fem_poisson.hpp"

#include <cmath>

namespace vpsrom {

PeriodicMesh build_mesh(double domain_length, int num_nodes)
{
  if (!(domain_length > 0) || !std::isfinite(domain_length))
    throw ConfigError("mesh: domain length must be positive, got " +
                      std::to_string(domain_length));
  if (num_nodes < 3)
    throw ConfigError("mesh: need at least 3 nodes, got " + std::to_string(num_nodes));
  return {domain_length, num_nodes, domain_length / num_nodes};
}

bool ChargeConfig::neutral(double length, double tol) const
{
  double tot = q * weight * num_particles + background * length;
  return std::abs(tot) <= tol * std::max(1.0, background * length);
}

ChargeConfig make_charge(const PeriodicMesh& mesh, int num_particles)
{
  if (num_particles < 1) throw ConfigError("charge: need at least one particle");
  ChargeConfig c;
  c.num_particles = num_particles;
  c.weight = mesh.length / num_particles;
  c.background = 1.0;
  return c;
}

Vec DepositMatrix::apply(const Vec& phi) const
{
  const Eigen::Index n = rows();
  Vec out(n);
  for (Eigen::Index l = 0; l < n; ++l)
    out(l) = w_left(l) * phi(left(l)) + w_right(l) * phi(right(l));
  return out;
}

Vec DepositMatrix::apply_transpose(const Vec& a) const
{
  Vec out = Vec::Zero(nx);
  const Eigen::Index n = rows();
  for (Eigen::Index l = 0; l < n; ++l) {
    out(left(l)) += w_left(l) * a(l);
    out(right(l)) += w_right(l) * a(l);
  }
  return out;
}

Mat DepositMatrix::to_dense() const
{
  Mat D = Mat::Zero(rows(), nx);
  for (Eigen::Index l = 0; l < rows(); ++l) {
    D(l, left(l)) += w_left(l);
    D(l, right(l)) += w_right(l);
  }
  return D;
}

namespace {

// cell index and local coordinate of a (possibly unwrapped) position
inline void locate(const PeriodicMesh& mesh, double x, Eigen::Index l, int& cell,
                   double& theta)
{
  if (!std::isfinite(x))
    throw EvaluationError("non-finite position for particle " + std::to_string(l));
  double s = x / mesh.h;
  double fl = std::floor(s);
  theta = s - fl;
  long long c = static_cast<long long>(fl) % mesh.nodes;
  if (c < 0) c += mesh.nodes;
  // s slightly below an integer can round theta up to exactly 1
  if (theta >= 1.0) {
    theta = 0.0;
    c = (c + 1) % mesh.nodes;
  }
  cell = static_cast<int>(c);
}

}  // namespace

DepositMatrix eval_basis(const PeriodicMesh& mesh, const Vec& positions)
{
  DepositMatrix D;
  D.kind = DepositMatrix::Kind::basis;
  D.nx = mesh.nodes;
  const Eigen::Index n = positions.size();
  D.left.resize(n);
  D.w_left.resize(n);
  D.w_right.resize(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    int c;
    double th;
    locate(mesh, positions(l), l, c, th);
    D.left(l) = c;
    D.w_left(l) = 1.0 - th;
    D.w_right(l) = th;
  }
  return D;
}

DepositMatrix eval_basis_grad(const PeriodicMesh& mesh, const Vec& positions)
{
  DepositMatrix D;
  D.kind = DepositMatrix::Kind::gradient;
  D.nx = mesh.nodes;
  const Eigen::Index n = positions.size();
  D.left.resize(n);
  D.w_left.setConstant(n, -1.0 / mesh.h);
  D.w_right.setConstant(n, 1.0 / mesh.h);
  for (Eigen::Index l = 0; l < n; ++l) {
    int c;
    double th;
    locate(mesh, positions(l), l, c, th);
    D.left(l) = c;
  }
  return D;
}

Vec deposit_charge(const DepositMatrix& basis, const ChargeConfig& charge,
                   const PeriodicMesh& mesh)
{
  Vec rho = Vec::Constant(mesh.nodes, charge.background * mesh.h);
  const double qw = charge.qw();
  for (Eigen::Index l = 0; l < basis.rows(); ++l) {
    rho(basis.left(l)) += qw * basis.w_left(l);
    rho(basis.right(l)) += qw * basis.w_right(l);
  }
  return rho;
}

PoissonOperator::PoissonOperator(const PeriodicMesh& mesh) : mesh_(mesh)
{
  const int n = mesh.nodes;
  L_ = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    L_(i, i) = 2.0 / mesh.h;
    L_(i, (i + 1) % n) = -1.0 / mesh.h;
    L_(i, (i + n - 1) % n) = -1.0 / mesh.h;
  }
  // (L + 11^T/n)^{-1} - 11^T/n inverts L on the zero-mean subspace
  Mat ones = Mat::Constant(n, n, 1.0 / n);
  pinv_ = (L_ + ones).ldlt().solve(Mat::Identity(n, n)) - ones;
  pinv_ = 0.5 * (pinv_ + pinv_.transpose()).eval();
}

Vec PoissonOperator::solve(const Vec& rho) const
{
  Vec r = rho.array() - rho.mean();
  Vec phi = pinv_ * r;
  phi.array() -= phi.mean();
  return phi;
}

Mat PoissonOperator::solve(const Mat& rho) const
{
  Mat r = rho.rowwise() - rho.colwise().mean();
  Mat phi = pinv_ * r;
  phi.rowwise() -= phi.colwise().mean();
  return phi;
}

PoissonOperator assemble_stiffness(const PeriodicMesh& mesh) { return PoissonOperator(mesh); }

double electric_energy(const PoissonOperator& op, const Vec& phi, double mp)
{
  return 0.5 / mp * phi.dot(op.stiffness() * phi);
}

Vec electric_field_at_particles(const DepositMatrix& grad_basis, const Vec& phi,
                                const ChargeConfig& charge)
{
  return (-charge.qw() / charge.mp()) * grad_basis.apply(phi);
}

Vec potential_of(const PoissonOperator& op, const ChargeConfig& charge,
                 const Vec& positions)
{
  return op.solve(deposit_charge(eval_basis(op.mesh(), positions), charge, op.mesh()));
}

}  // namespace vpsrom
