#pragma once

#include <vector>

#include "vpsrom/fem_poisson.hpp"
#include "vpsrom/symplectic.hpp"
#include "vpsrom/timers.hpp"
#include "vpsrom/types.hpp"

namespace vpsrom {

// ---------------------------------------------------------------- subsample

// Farthest-point selection on the columns of Z0, starting from the column of
// largest norm. With isolation = true every candidate is scored by its
// distance to the nearest other column instead of to the selected set.
std::vector<int> select_parameter_subset(const Mat& Z0, int p_star, bool isolation = false);

// ---------------------------------------------------------------------- DMD

struct DmdFit {
  CMat modes;    // Theta, N_x x r
  CVec lambda;   // discrete eigenvalues
  Vec sigma;     // singular values of Y
  int rank = 0;  // retained singular values
};

// Projected exact DMD of the pairs (Y, Y'); keeps sigma_j >= svd_tol sigma_1.
DmdFit dmd_fit(const Mat& Y, const Mat& Yp, double svd_tol = 1e-5);

// Least-squares coordinates Theta^+ phi.
CVec dmd_coordinates(const CMat& Theta, const Vec& phi);

struct DmdModel {
  CMat Theta;
  CVec omega;             // log(lambda)/dt, principal branch
  std::vector<CVec> Pi;   // one coordinate vector per parameter
  double t_anchor = 0;

  int rank() const { return static_cast<int>(Theta.cols()); }
};

// Drops modes with |lambda| < min_abs and converts to continuous exponents.
DmdModel make_dmd_model(const DmdFit& fit, double dt, double t_anchor, double min_abs = 1e-12);

// Re(Theta (Pi_i .* exp(omega (t - t_anchor)))). imag_ratio receives
// ||Im|| / ||Re|| of the complex reconstruction.
Vec dmd_extrapolate(const DmdModel& model, int i, double t, double* imag_ratio = nullptr);

// Ring buffers of the last T+1 potentials of every subsampled parameter.
class DmdWindow {
 public:
  DmdWindow(int num_series, int nx, int T);

  void push(int series, const Vec& phi);
  bool full() const;
  int T() const { return T_; }
  // oldest-first samples 0..T of one series
  Vec sample(int series, int j) const;
  // Y = samples 0..T-1 and Y' = samples 1..T, concatenated over series
  void snapshot_pairs(Mat& Y, Mat& Yp) const;

 private:
  int T_;
  std::vector<Mat> buf_;
  std::vector<int> head_, count_;
};

// ---------------------------------------------------------------------- RBF

// Gaussian RBF exp(-(eps r)^2) with a linear polynomial tail, one system
// shared by all value columns. eps defaults to 1 / median pairwise distance.
class RbfInterpolator {
 public:
  explicit RbfInterpolator(const Mat& nodes, double eps = 0);

  // values: m x r at the nodes; returns q x r at the query points
  Mat interpolate(const Mat& values, const Mat& queries) const;
  CMat interpolate(const CMat& values, const Mat& queries) const;

  double eps() const { return eps_; }
  bool nearest_neighbour() const { return nearest_; }
  bool has_tail() const { return tail_; }

 private:
  Vec kernel_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;

  Mat nodes_;
  double eps_ = 0;
  bool tail_ = false, nearest_ = false;
  Eigen::PartialPivLU<Mat> lu_;
};

// Coordinates of every query; queries coinciding with subsample indices keep
// their directly computed values.
std::vector<CVec> rbf_interpolate_coordinates(const Mat& params, const std::vector<int>& subsample,
                                              const std::vector<CVec>& Pi_sub);

// --------------------------------------------------------------------- DEIM

struct DeimModel {
  Mat Psi;                  // N x d
  std::vector<int> indices; // I_deim
  Vec w;                    // (P^T Psi)^{-T} Psi^T M_q
  int age = 0;              // updates since the last full rebuild
  int full_rebuilds = 0;
  double amplification = 0;  // ||(P^T Psi)^{-1}||_2 after the last full rebuild

  int d() const { return static_cast<int>(indices.size()); }
  // Psi (P^T Psi)^{-1} P^T F
  Vec interpolate(const Vec& F) const;
};

// Leading left singular vectors of Y, truncated to its numerical rank.
Mat deim_basis(const Mat& Y, int d, double rank_tol = 1e-10);
std::vector<int> deim_greedy(const Mat& Psi);
void deim_refresh_weights(DeimModel& m, const Vec& Mq);
DeimModel deim_fit(const Mat& Y, int d, const Vec& Mq, double rank_tol = 1e-10);

struct DeimUpdateOptions {
  int n_update = 12;
  int k_deim = 3;             // full rebuild every k_deim-th update
  bool most_aligned = false;  // update the most aligned vectors instead
  // an updated index set whose ||(P^T Psi)^{-1}||_2 exceeds this multiple of the
  // value after the last rebuild is discarded for a full rebuild
  double amplification_limit = 10;
};

// ||(P^T Psi)^{-1}||_2, the DEIM error amplification of an index set
double deim_amplification(const Mat& Psi, const std::vector<int>& indices);

// Index update for a new basis Psi_new.
DeimModel deim_update_indices(const Mat& Psi_new, const DeimModel& old, const Vec& Mq,
                              const DeimUpdateOptions& opt);

// ------------------------------------------------------ hyper-reduced field

// Gradient of 1/2 |U_V z|^2 + m_p^{-1} w^T Lambda0(x_I) phi_dmd with x_I the
// DEIM rows of U_X z.
Vec hyperreduced_gradient(const Mat& U, const Vec& z, const Vec& phi_dmd, const DeimModel& deim,
                          const PeriodicMesh& mesh, const ChargeConfig& charge);

// 1/2 |U_V z|^2 + 1/2 m_p^{-1} w^T Lambda0(x_I) phi_dmd, the energy-valued
// DMD-DEIM Hamiltonian.
double hyperreduced_hamiltonian(const Mat& U, const Vec& z, const Vec& phi_dmd,
                                const DeimModel& deim, const PeriodicMesh& mesh,
                                const ChargeConfig& charge);

class HyperReducedField : public CoefficientField {
 public:
  HyperReducedField(const DmdModel& dmd, const DeimModel& deim, const PeriodicMesh& mesh,
                    const ChargeConfig& charge)
      : dmd_(&dmd), deim_(&deim), mesh_(mesh), charge_(charge)
  {
  }
  void prepare(const Mat& U_half, double t_mid) override;
  std::function<Vec(const Vec&)> column(int i) const override;

  // largest ||Im|| / ||Re|| seen by the extrapolations of the last step
  double max_imag_ratio() const;

 private:
  const DmdModel* dmd_;
  const DeimModel* deim_;
  PeriodicMesh mesh_;
  ChargeConfig charge_;
  Mat gram_v_, UXd_;
  double t_ = 0;
  mutable std::vector<double> imag_;
};

// --------------------------------------------------------- window upkeep

struct HyperReductionOptions {
  int T = 3;
  int d = 32;
  double svd_tol = 1e-5;
  double deim_rank_tol = 1e-10;
  double imag_warn = 1e-3;
  DeimUpdateOptions deim;
};

// Owns the DMD and DEIM windows of the subsampled parameters and the models
// fitted from them.
class HyperReducer {
 public:
  HyperReducer(int p_star, int N, const PeriodicMesh& mesh, const ChargeConfig& charge,
               const HyperReductionOptions& opt);

  // j indexes the subsample; basis is Lambda0(X_r) of the same state
  void push(int j, const Vec& phi, const DepositMatrix& basis);
  bool ready() const { return window_.full(); }

  // Fits both models. params_unit are all parameters mapped to the unit box,
  // anchor_phi the newest potential of every subsampled parameter.
  void fit(double t_anchor, double dt, const Mat& params_unit, const std::vector<int>& subsample,
           PhaseTimers* timers = nullptr);

  const DmdModel& dmd() const { return dmd_; }
  const DeimModel& deim() const { return deim_; }
  bool fitted() const { return fitted_; }
  int fits() const { return fits_; }
  const HyperReductionOptions& options() const { return opt_; }

 private:
  HyperReductionOptions opt_;
  int p_star_;
  PeriodicMesh mesh_;
  ChargeConfig charge_;
  Vec Mq_;
  DmdWindow window_;
  Mat deim_data_;  // N x p*(T+1), slot (j, sample) at column j (T+1) + sample
  std::vector<int> deim_head_;
  DmdModel dmd_;
  DeimModel deim_;
  bool fitted_ = false;
  int fits_ = 0;
};

}  // namespace vpsrom
