#include "dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace oracle {

Mat dense_J(int m)
{
  const int h = m / 2;
  Mat J = Mat::Zero(m, m);
  for (int i = 0; i < h; ++i) {
    J(i, h + i) = 1;
    J(h + i, i) = -1;
  }
  return J;
}

Mat random_matrix(int rows, int cols, std::mt19937_64& rng)
{
  std::normal_distribution<double> g;
  Mat A(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) A(i, j) = g(rng);
  return A;
}

Mat random_orthosymplectic(int N, int n, std::mt19937_64& rng)
{
  // orthonormal complex columns Q = Phi + i Psi give [[Phi, -Psi], [Psi, Phi]]
  CMat C(N, n / 2);
  C.real() = random_matrix(N, n / 2, rng);
  C.imag() = random_matrix(N, n / 2, rng);
  Eigen::HouseholderQR<CMat> qr(C);
  CMat Q = qr.householderQ() * CMat::Identity(N, n / 2);
  Mat U(2 * N, n);
  U << Q.real(), -Q.imag(), Q.imag(), Q.real();
  return U;
}

Mat cayley(const Mat& U, const Mat& xi)
{
  const Eigen::Index m = U.rows();
  const Mat I = Mat::Identity(m, m);
  Mat W = (I - 0.5 * U * U.transpose()) * xi;
  Mat M = W * U.transpose() - U * W.transpose();
  return (I - 0.5 * M).inverse() * (I + 0.5 * M) * U;
}

Mat basis_velocity(const Mat& U, const Mat& Z, const Mat& G)
{
  const int m = static_cast<int>(U.rows()), n = static_cast<int>(U.cols());
  const Mat J = dense_J(m), Jn = dense_J(n);
  Mat S = Z * Z.transpose() + Jn.transpose() * Z * Z.transpose() * Jn;
  Mat P = Mat::Identity(m, m) - U * U.transpose();
  return P * (J * G * Z.transpose() - G * Z.transpose() * Jn.transpose()) * S.inverse();
}

Mat tangent_velocity(const Mat& xi, const Mat& U, const Mat& Xr)
{
  const Eigen::Index m = U.rows(), n = U.cols();
  const Mat I = Mat::Identity(m, m), In = Mat::Identity(n, n);
  Mat R = cayley(U, xi);
  Mat W = (I - 0.5 * U * U.transpose()) * xi;
  Mat Ups = (2 * Xr - (W * U.transpose() - U * W.transpose()) * Xr) *
            (U.transpose() * R + In).inverse();
  return -U * (R.transpose() * U + In).inverse() * (R + U).transpose() * Ups + Ups -
         U * Ups.transpose() * U;
}

Mat stiffness(const vpsrom::PeriodicMesh& mesh)
{
  const int n = mesh.nodes;
  Mat L = Mat::Zero(n, n);
  Eigen::Matrix2d Ke;
  Ke << 1, -1, -1, 1;
  Ke /= mesh.h;
  for (int e = 0; e < n; ++e) {
    const int a = e, b = (e + 1) % n;
    L(a, a) += Ke(0, 0);
    L(a, b) += Ke(0, 1);
    L(b, a) += Ke(1, 0);
    L(b, b) += Ke(1, 1);
  }
  return L;
}

namespace {

// signed offset of x from node j, folded into [-length/2, length/2)
double offset(const vpsrom::PeriodicMesh& mesh, int j, double x)
{
  double d = std::fmod(x - mesh.node(j), mesh.length);
  if (d < -0.5 * mesh.length) d += mesh.length;
  if (d >= 0.5 * mesh.length) d -= mesh.length;
  return d;
}

}  // namespace

double hat(const vpsrom::PeriodicMesh& mesh, int j, double x)
{
  return std::max(0.0, 1.0 - std::abs(offset(mesh, j, x)) / mesh.h);
}

double hat_slope(const vpsrom::PeriodicMesh& mesh, int j, double x)
{
  const double d = offset(mesh, j, x);
  if (std::abs(d) >= mesh.h) return 0.0;
  return d >= 0 ? -1.0 / mesh.h : 1.0 / mesh.h;
}

Mat basis_matrix(const vpsrom::PeriodicMesh& mesh, const Vec& X)
{
  Mat B(X.size(), mesh.nodes);
  for (Eigen::Index l = 0; l < X.size(); ++l)
    for (int j = 0; j < mesh.nodes; ++j) B(l, j) = hat(mesh, j, X(l));
  return B;
}

Vec potential(const vpsrom::PeriodicMesh& mesh, const vpsrom::ChargeConfig& c, const Vec& X)
{
  Vec rho = basis_matrix(mesh, X).transpose() * Vec::Constant(X.size(), c.qw());
  rho.array() += c.background * mesh.h;
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(stiffness(mesh));
  Vec phi = cod.solve(rho);
  return phi.array() - phi.mean();
}

double hamiltonian(const vpsrom::PeriodicMesh& mesh, const vpsrom::ChargeConfig& c, const Vec& X,
                   const Vec& V)
{
  Vec phi = potential(mesh, c, X);
  return 0.5 * V.squaredNorm() + 0.5 / c.mp() * phi.dot(stiffness(mesh) * phi);
}

double reduced_hamiltonian(const vpsrom::PeriodicMesh& mesh, const vpsrom::ChargeConfig& c,
                           const Mat& U, const Vec& z)
{
  const Eigen::Index N = U.rows() / 2;
  return hamiltonian(mesh, c, U.topRows(N) * z, U.bottomRows(N) * z);
}

double hyperreduced_potential(const vpsrom::PeriodicMesh& mesh, const vpsrom::ChargeConfig& c,
                              const Mat& U, const Vec& z, const Vec& phi,
                              const vpsrom::DeimModel& deim)
{
  const Eigen::Index N = U.rows() / 2;
  const int d = deim.d();
  Mat P = Mat::Zero(N, d);
  for (int k = 0; k < d; ++k) P(deim.indices[k], k) = 1;
  Vec F = basis_matrix(mesh, U.topRows(N) * z) * phi;
  Vec Mq = Vec::Constant(N, c.qw());
  Vec interp = deim.Psi * (P.transpose() * deim.Psi).inverse() * (P.transpose() * F);
  return 0.5 * (U.bottomRows(N) * z).squaredNorm() + Mq.dot(interp) / c.mp();
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& z, double h)
{
  Vec g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    Vec a = z, b = z;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

Vec LinearSystem::state(int s, int k) const
{
  CVec y = y0[s].cast<vpsrom::cplx>();
  for (int j = 0; j < k; ++j) y = A * y;
  return y.real();
}

LinearSystem synthetic_linear_system(int nx, const CVec& eigenvalues, int series, int T,
                                     std::mt19937_64& rng)
{
  const int r = static_cast<int>(eigenvalues.size());
  LinearSystem sys;
  sys.eigenvalues = eigenvalues;
  // A = Q diag(lambda) Q^+ with Q random nx x r; real when eigenvalues come in
  // conjugate pairs and the matching columns are conjugate
  CMat Q(nx, r);
  for (int j = 0; j < r; ++j) {
    if (j > 0 && std::abs(eigenvalues(j) - std::conj(eigenvalues(j - 1))) < 1e-14 &&
        std::abs(eigenvalues(j).imag()) > 0) {
      Q.col(j) = Q.col(j - 1).conjugate();
      continue;
    }
    Mat re = random_matrix(nx, 1, rng), im = random_matrix(nx, 1, rng);
    if (std::abs(eigenvalues(j).imag()) > 0) {
      Q.col(j).real() = re.col(0);
      Q.col(j).imag() = im.col(0);
    } else {
      Q.col(j) = re.col(0).cast<vpsrom::cplx>();
    }
  }
  CMat Qp = Q.completeOrthogonalDecomposition().pseudoInverse();
  sys.A = Q * eigenvalues.asDiagonal() * Qp;
  sys.Y.resize(nx, static_cast<Eigen::Index>(series) * T);
  sys.Yp.resize(nx, static_cast<Eigen::Index>(series) * T);
  for (int s = 0; s < series; ++s) {
    // a real starting vector in range(Q)
    CVec c(r);
    for (int j = 0; j < r; ++j) {
      if (j > 0 && std::abs(eigenvalues(j) - std::conj(eigenvalues(j - 1))) < 1e-14 &&
          std::abs(eigenvalues(j).imag()) > 0) {
        c(j) = std::conj(c(j - 1));
        continue;
      }
      Mat v = random_matrix(2, 1, rng);
      c(j) = std::abs(eigenvalues(j).imag()) > 0 ? vpsrom::cplx(v(0), v(1)) : vpsrom::cplx(v(0));
    }
    sys.y0.push_back((Q * c).real());
    for (int k = 0; k < T; ++k) {
      sys.Y.col(s * T + k) = sys.state(s, k);
      sys.Yp.col(s * T + k) = sys.state(s, k + 1);
    }
  }
  return sys;
}

double spectrum_distance(const CVec& a, const CVec& b)
{
  if (a.size() != b.size()) return INFINITY;
  std::vector<int> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double worst = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a(i) - b(perm[i])));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace oracle
