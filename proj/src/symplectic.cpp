#include "vpsrom/symplectic.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "vpsrom/parallel.hpp"
#include "vpsrom/pic.hpp"

namespace vpsrom {

Mat apply_J(const Mat& A)
{
  const Eigen::Index h = A.rows() / 2;
  Mat out(A.rows(), A.cols());
  out.topRows(h) = A.bottomRows(h);
  out.bottomRows(h) = -A.topRows(h);
  return out;
}

Mat right_J(const Mat& A)
{
  const Eigen::Index h = A.cols() / 2;
  Mat out(A.rows(), A.cols());
  out.leftCols(h) = -A.rightCols(h);
  out.rightCols(h) = A.leftCols(h);
  return out;
}

Mat poisson_tensor(int m)
{
  const int h = m / 2;
  Mat J = Mat::Zero(m, m);
  J.topRightCorner(h, h).setIdentity();
  J.bottomLeftCorner(h, h) = -Mat::Identity(h, h);
  return J;
}

double orthogonality_residual(const Mat& U)
{
  return (U.transpose() * U - Mat::Identity(U.cols(), U.cols())).norm();
}

double symplecticity_residual(const Mat& U)
{
  return (U.transpose() * apply_J(U) - poisson_tensor(static_cast<int>(U.cols()))).norm();
}

CMat leading_left_singular_vectors(const CMat& C, int k, Vec* sigma)
{
  const Eigen::Index N = C.rows(), p = C.cols();
  if (k < 0 || k > std::min(N, p))
    throw ConfigError("requested " + std::to_string(k) + " singular vectors of a " +
                      std::to_string(N) + "x" + std::to_string(p) + " matrix");
  if (N <= p) {
    Eigen::BDCSVD<CMat> svd(C, Eigen::ComputeThinU);
    if (sigma) *sigma = svd.singularValues();
    return svd.matrixU().leftCols(k);
  }
  Eigen::HouseholderQR<CMat> qr(C);
  CMat R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  Eigen::BDCSVD<CMat> svd(R, Eigen::ComputeThinU);
  if (sigma) *sigma = svd.singularValues();
  CMat Q = CMat::Zero(N, k);
  Q.topRows(p) = svd.matrixU().leftCols(k);
  Q.applyOnTheLeft(qr.householderQ());
  return Q;
}

CsvdBasis complex_svd_basis(const Mat& SX, const Mat& SV, int n)
{
  if (SX.rows() != SV.rows() || SX.cols() != SV.cols())
    throw ConfigError("complex_svd_basis: S_X and S_V shapes differ");
  if (n <= 0 || n % 2) throw ConfigError("complex_svd_basis: n must be positive and even");
  if (n > 2 * std::min(SX.rows(), SX.cols()))
    throw ConfigError("complex_svd_basis: n exceeds 2 min(N, p)");
  const Eigen::Index N = SX.rows();
  const int k = n / 2;
  CMat C(N, SX.cols());
  C.real() = SX;
  C.imag() = SV;
  CsvdBasis out;
  CMat Q = leading_left_singular_vectors(C, k, &out.sigma);
  Mat Phi = Q.real(), Psi = Q.imag();
  out.U.resize(2 * N, n);
  out.U << Phi, -Psi, Psi, Phi;
  out.Z.resize(n, SX.cols());
  out.Z.topRows(k) = Phi.transpose() * SX + Psi.transpose() * SV;
  out.Z.bottomRows(k) = Phi.transpose() * SV - Psi.transpose() * SX;
  return out;
}

SMatrix s_matrix(const Mat& Z, double cond_limit)
{
  SMatrix s;
  Mat A = Z * Z.transpose();
  // J^T A J = -J (A J)
  s.S = A - apply_J(right_J(A));
  s.S = 0.5 * (s.S + s.S.transpose()).eval();
  s.ldlt.compute(s.S);
  Eigen::SelfAdjointEigenSolver<Mat> es(s.S, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
  s.cond = lmin > 0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  s.near_singular = !(s.cond <= cond_limit);
  if (s.near_singular) spdlog::warn("S(Z) is near singular (condition number {:.3e})", s.cond);
  return s;
}

FullGradient full_gradient(const Mat& U, const Vec& z, const PoissonOperator& op,
                           const ChargeConfig& charge)
{
  const Eigen::Index N = U.rows() / 2;
  Vec X = U.topRows(N) * z;
  FieldEval f = evaluate_field(op, charge, X);
  FullGradient g;
  g.G.resize(2 * N);
  g.G.head(N) = -f.E;
  g.G.tail(N) = U.bottomRows(N) * z;
  g.basis = eval_basis(op.mesh(), X);
  g.phi = std::move(f.phi);
  g.energy = f.energy;
  return g;
}

Vec reduced_gradient(const Mat& U, const Vec& z, const PoissonOperator& op,
                     const ChargeConfig& charge)
{
  const Eigen::Index N = U.rows() / 2;
  Vec X = U.topRows(N) * z;
  FieldEval f = evaluate_field(op, charge, X);
  auto UV = U.bottomRows(N);
  return -(U.topRows(N).transpose() * f.E) + UV.transpose() * (UV * z);
}

Mat basis_velocity(const Mat& U, const Mat& Zsub, const Mat& Gsub, bool* near_singular)
{
  SMatrix S = s_matrix(Zsub);
  if (near_singular) *near_singular = S.near_singular;
  Mat GZ = Gsub * Zsub.transpose();  // 2N x n
  // -G Z^T J^T = G Z^T J
  Mat M = apply_J(GZ) + right_J(GZ);
  M = S.solve(M.transpose()).transpose();
  return M - U * (U.transpose() * M);
}

Mat retraction(const Mat& U, const Mat& xi)
{
  const Eigen::Index n = U.cols(), rows = U.rows();
  Mat W = xi - 0.5 * U * (U.transpose() * xi);
  Mat A(rows, 2 * n), B(rows, 2 * n);
  A << W, -U;
  B << U, W;
  Mat K = Mat::Identity(2 * n, 2 * n) - 0.5 * B.transpose() * A;
  Eigen::PartialPivLU<Mat> lu(K);
  if (!(std::abs(lu.determinant()) > 1e-14) || !(lu.rcond() > 1e-14))
    throw StepSizeError("Cayley retraction system is singular; reduce dt");
  return U + A * lu.solve(B.transpose() * U);
}

Mat tangent_velocity(const Mat& xi, const Mat& U, const Mat& R, const Mat& Xr)
{
  const Eigen::Index n = U.cols();
  const Mat I = Mat::Identity(n, n);
  Mat W = xi - 0.5 * U * (U.transpose() * xi);
  Mat K = U.transpose() * R + I;
  // every solve below is with K^T
  Eigen::PartialPivLU<Mat> luT(K.transpose());
  if (!(luT.rcond() > 1e-14))
    throw StepSizeError("tangent-space system U^T R + I is singular; reduce dt");
  // (W U^T - U W^T) X = W (U^T X) - U (W^T X)
  Mat M = 2 * Xr - (W * (U.transpose() * Xr) - U * (W.transpose() * Xr));
  // Upsilon = M K^{-1}
  Mat Ups = luT.solve(M.transpose()).transpose();
  // (R^T U + I) = K^T
  Mat first = U * luT.solve((R + U).transpose() * Ups);
  return -first + Ups - U * (Ups.transpose() * U);
}

FixedPointResult fixed_point_solve(const std::function<Mat(const Mat&)>& map, Mat x0,
                                   const FixedPointOptions& opt)
{
  if (!(opt.tol > 0)) throw ConfigError("fixed_point_solve: tol must be positive");
  std::vector<double> trace;
  std::vector<Mat> tail;
  const int cycle = std::max(opt.cycle, 1);
  Mat x = std::move(x0);
  for (int it = 1; it <= opt.max_iter; ++it) {
    Mat xn = map(x);
    const double d = (xn - x).norm();
    trace.push_back(d);
    if (!std::isfinite(d)) break;
    x = std::move(xn);
    if (d <= opt.tol * std::max(x.norm(), 1.0)) return {std::move(x), it, false};
    if (opt.stall_tol > 0 && opt.max_iter - it < cycle) tail.push_back(x);
  }
  if (opt.stall_tol > 0 && static_cast<int>(tail.size()) == cycle) {
    // small updates that no longer grow from one cycle to the next
    const double bound = opt.stall_tol * std::max(x.norm(), 1.0);
    const auto end = trace.end();
    const double last = *std::max_element(end - cycle, end);
    bool bounded = last <= bound;
    if (static_cast<int>(trace.size()) >= 2 * cycle)
      bounded &= last <= *std::max_element(end - 2 * cycle, end - cycle) * (1 + 1e-6);
    if (bounded) {
      Mat mean = Mat::Zero(x.rows(), x.cols());
      for (const Mat& t : tail) mean += t;
      return {mean / cycle, opt.max_iter, true};
    }
  }
  std::string msg = "fixed-point iteration did not converge after " +
                    std::to_string(trace.size()) + " iterations; last updates:";
  for (std::size_t j = trace.size() > 5 ? trace.size() - 5 : 0; j < trace.size(); ++j)
    msg += " " + std::to_string(trace[j]);
  throw FixedPointError(msg, std::move(trace));
}

void FullCoefficientField::prepare(const Mat& U_half, double)
{
  U_ = U_half;
  const Eigen::Index N = U_.rows() / 2;
  gram_v_ = U_.bottomRows(N).transpose() * U_.bottomRows(N);
}

std::function<Vec(const Vec&)> FullCoefficientField::column(int) const
{
  return [this](const Vec& z) {
    const Eigen::Index N = U_.rows() / 2;
    Vec X = U_.topRows(N) * z;
    FieldEval f = evaluate_field(*op_, charge_, X);
    return Vec(-(U_.topRows(N).transpose() * f.E) + gram_v_ * z);
  };
}

namespace {

Vec J_vec(const Vec& g)
{
  const Eigen::Index h = g.size() / 2;
  Vec out(g.size());
  out.head(h) = g.tail(h);
  out.tail(h) = -g.head(h);
  return out;
}

Mat columns(const Mat& Z, const std::vector<int>& idx)
{
  Mat out(Z.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(j) = Z.col(idx[j]);
  return out;
}

}  // namespace

Prk2Result prk2_step(const ReducedState& s, double dt, const std::vector<int>& subsample,
                     const BasisGradientFn& basis_gradient, CoefficientField& coeff,
                     const Prk2Options& opt)
{
  Prk2Result r;
  const int p = static_cast<int>(s.Z.cols());
  Mat k1hat;
  {
    PhaseTimers::Scope sc(opt.timers, opt.basis_label);
    Mat Zs = columns(s.Z, subsample);
    Mat G = basis_gradient(s.U, Zs, 0);
    bool ns = false;
    k1hat = basis_velocity(s.U, Zs, G, &ns);
    r.near_singular |= ns;
    r.U_half = retraction(s.U, 0.5 * dt * k1hat);
    coeff.prepare(r.U_half, s.t + 0.5 * dt);
  }

  Mat K(s.Z.rows(), p);
  std::vector<int> iters(p, 0);
  std::vector<char> stalled(p, 0);
  {
    PhaseTimers::Scope sc(opt.timers, opt.coeff_label);
    parallel_for(p, opt.workers, [&](int i) {
      auto g = coeff.column(i);
      const Vec z0 = s.Z.col(i);
      auto map = [&](const Mat& k) -> Mat { return J_vec(g(z0 + 0.5 * dt * k.col(0))); };
      try {
        FixedPointResult fp = fixed_point_solve(map, J_vec(g(z0)), opt.fp);
        K.col(i) = fp.x.col(0);
        iters[i] = fp.iterations;
        stalled[i] = fp.stalled;
      } catch (const FixedPointError& e) {
        throw FixedPointError("parameter " + std::to_string(i) + " at t = " +
                                  std::to_string(s.t) + ": " + e.what(),
                              e.trace);
      }
    });
  }
  r.Z_mid = s.Z + 0.5 * dt * K;
  r.next.Z = s.Z + dt * K;
  r.next.t = s.t + dt;
  for (int it : iters) {
    r.fp_iterations_max = std::max(r.fp_iterations_max, it);
    r.fp_iterations_mean += it;
  }
  r.fp_iterations_mean /= std::max(1, p);
  for (int i = 0; i < p; ++i)
    if (stalled[i]) {
      ++r.fp_stalled;
      spdlog::warn("t = {}: parameter {} implicit stage accepted at a bounded cycle", s.t, i);
    }

  {
    PhaseTimers::Scope sc(opt.timers, opt.basis_label);
    Mat Zs = columns(r.Z_mid, subsample);
    Mat G = basis_gradient(r.U_half, Zs, 1);
    bool ns = false;
    Mat Xh = basis_velocity(r.U_half, Zs, G, &ns);
    r.near_singular |= ns;
    Mat k2hat = tangent_velocity(0.5 * dt * k1hat, s.U, r.U_half, Xh);
    r.next.U = retraction(s.U, dt * k2hat);
  }
  return r;
}

}  // namespace vpsrom
