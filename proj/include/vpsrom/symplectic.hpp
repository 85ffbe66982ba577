#pragma once

#include <functional>
#include <vector>

#include "vpsrom/fem_poisson.hpp"
#include "vpsrom/timers.hpp"
#include "vpsrom/types.hpp"

namespace vpsrom {

// Poisson tensor products without storing J = [[0, I], [-I, 0]].
// J A for A with an even number of rows: [A_2; -A_1]
Mat apply_J(const Mat& A);
// A J for A with an even number of columns: [-A_2, A_1]
Mat right_J(const Mat& A);
// dense J_m, only for small m
Mat poisson_tensor(int m);

struct ReducedState {
  Mat U;  // 2N x n, rows 0..N-1 are U_X
  Mat Z;  // n x p
  double t = 0;

  Eigen::Index N() const { return U.rows() / 2; }
  int n() const { return static_cast<int>(U.cols()); }
};

double orthogonality_residual(const Mat& U);   // ||U^T U - I||_F
double symplecticity_residual(const Mat& U);   // ||U^T J U - J_n||_F

// Leading k left singular vectors of C (thin QR then a small SVD).
CMat leading_left_singular_vectors(const CMat& C, int k, Vec* sigma = nullptr);

struct CsvdBasis {
  Mat U, Z;
  Vec sigma;  // singular values of S_X + i S_V
};

CsvdBasis complex_svd_basis(const Mat& SX, const Mat& SV, int n);

// S(Z) = Z Z^T + J^T Z Z^T J with a symmetric factorization
struct SMatrix {
  Mat S;
  Eigen::LDLT<Mat> ldlt;
  double cond = 0;
  bool near_singular = false;

  // S^{-1} B
  Mat solve(const Mat& B) const { return ldlt.solve(B); }
};

SMatrix s_matrix(const Mat& Z, double cond_limit = 1e12);

struct FullGradient {
  Vec G;               // 2N, top block m_p^{-1} M_q .* gradLambda0 phi, bottom V_r
  DepositMatrix basis; // Lambda0(X_r)
  Vec phi;
  double energy = 0;   // electric energy at X_r
};

FullGradient full_gradient(const Mat& U, const Vec& z, const PoissonOperator& op,
                           const ChargeConfig& charge);

// U^T G without forming G's bottom block: U_X^T G_top + (U_V^T U_V) z
Vec reduced_gradient(const Mat& U, const Vec& z, const PoissonOperator& op,
                     const ChargeConfig& charge);

// (I - U U^T)(J G Z^T - G Z^T J^T) S(Z)^{-1}
Mat basis_velocity(const Mat& U, const Mat& Zsub, const Mat& Gsub,
                   bool* near_singular = nullptr);

// Cayley retraction at U of the tangent vector xi, via the 2n x 2n system
Mat retraction(const Mat& U, const Mat& xi);

// Velocity of the tangent-space flow at U; R is the retraction of xi and Xr the
// basis velocity evaluated at R.
Mat tangent_velocity(const Mat& xi, const Mat& U, const Mat& R, const Mat& Xr);

struct FixedPointOptions {
  double tol = 1e-9;
  int max_iter = 100;
  // a non-converged iteration whose last `cycle` updates stay below
  // stall_tol max(||x||, 1) and do not grow over the previous cycle is
  // accepted at the mean of its last `cycle` iterates; 0 disables
  double stall_tol = 0;
  int cycle = 4;
};

struct FixedPointResult {
  Mat x;
  int iterations = 0;
  bool stalled = false;
};

struct FixedPointError : std::runtime_error {
  FixedPointError(const std::string& what, std::vector<double> t)
      : std::runtime_error(what), trace(std::move(t))
  {
  }
  std::vector<double> trace;  // update norm per iteration
};

// Iterates x <- map(x) until ||x_new - x|| <= tol max(||x_new||, 1). A map
// with a jump (a particle on a mesh node) can cycle without a fixed point;
// see FixedPointOptions::stall_tol.
FixedPointResult fixed_point_solve(const std::function<Mat(const Mat&)>& map, Mat x0,
                                   const FixedPointOptions& opt = {});

// Gradient providers for one PRK2 step.
//
// Full gradients of the subsampled parameters at (U, Zsub); stage 0 is the
// start of the step, stage 1 the half step.
using BasisGradientFn = std::function<Mat(const Mat& U, const Mat& Zsub, int stage)>;

// Reduced gradient z -> g_i(U_half, z) of every parameter.
class CoefficientField {
 public:
  virtual ~CoefficientField() = default;
  // N-dependent setup at the frozen half-step basis
  virtual void prepare(const Mat& U_half, double t_mid) = 0;
  // per-parameter map; called after prepare, possibly from several threads
  virtual std::function<Vec(const Vec&)> column(int i) const = 0;
};

// Exact reduced gradient U^T G for every parameter.
class FullCoefficientField : public CoefficientField {
 public:
  FullCoefficientField(const PoissonOperator& op, const ChargeConfig& charge)
      : op_(&op), charge_(charge)
  {
  }
  void prepare(const Mat& U_half, double) override;
  std::function<Vec(const Vec&)> column(int i) const override;

 private:
  const PoissonOperator* op_;
  ChargeConfig charge_;
  Mat U_;
  Mat gram_v_;
};

struct Prk2Options {
  FixedPointOptions fp;
  int workers = 1;
  PhaseTimers* timers = nullptr;
  std::string basis_label = phase::rom_basis;
  std::string coeff_label = phase::rom_coeff;
};

struct Prk2Result {
  ReducedState next;
  Mat U_half;
  Mat Z_mid;
  int fp_iterations_max = 0;
  double fp_iterations_mean = 0;
  int fp_stalled = 0;  // parameters accepted at a bounded cycle
  bool near_singular = false;
};

Prk2Result prk2_step(const ReducedState& s, double dt, const std::vector<int>& subsample,
                     const BasisGradientFn& basis_gradient, CoefficientField& coeff,
                     const Prk2Options& opt = {});

}  // namespace vpsrom
