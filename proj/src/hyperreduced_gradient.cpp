#include <algorithm>

#include <spdlog/spdlog.h>

#include "vpsrom/hyperreduction.hpp"

namespace vpsrom {

namespace {

Mat deim_rows(const Mat& U, const std::vector<int>& idx)
{
  Mat out(static_cast<Eigen::Index>(idx.size()), U.cols());
  for (std::size_t j = 0; j < idx.size(); ++j) out.row(j) = U.row(idx[j]);
  return out;
}

// gradLambda0(x) phi at the DEIM particles
Vec grad_potential(const PeriodicMesh& mesh, const Vec& x, const Vec& phi)
{
  return eval_basis_grad(mesh, x).apply(phi);
}

}  // namespace

Vec hyperreduced_gradient(const Mat& U, const Vec& z, const Vec& phi_dmd, const DeimModel& deim,
                          const PeriodicMesh& mesh, const ChargeConfig& charge)
{
  const Eigen::Index N = U.rows() / 2;
  auto UV = U.bottomRows(N);
  Mat UXd = deim_rows(U.topRows(N), deim.indices);
  Vec v = grad_potential(mesh, UXd * z, phi_dmd);
  return UV.transpose() * (UV * z) + UXd.transpose() * v.cwiseProduct(deim.w) / charge.mp();
}

double hyperreduced_hamiltonian(const Mat& U, const Vec& z, const Vec& phi_dmd,
                                const DeimModel& deim, const PeriodicMesh& mesh,
                                const ChargeConfig& charge)
{
  const Eigen::Index N = U.rows() / 2;
  Mat UXd = deim_rows(U.topRows(N), deim.indices);
  Vec interp = eval_basis(mesh, UXd * z).apply(phi_dmd);
  return 0.5 * (U.bottomRows(N) * z).squaredNorm() + 0.5 / charge.mp() * deim.w.dot(interp);
}

void HyperReducedField::prepare(const Mat& U_half, double t_mid)
{
  const Eigen::Index N = U_half.rows() / 2;
  gram_v_ = U_half.bottomRows(N).transpose() * U_half.bottomRows(N);
  UXd_ = deim_rows(U_half.topRows(N), deim_->indices);
  t_ = t_mid;
  imag_.assign(dmd_->Pi.size(), 0.0);
}

std::function<Vec(const Vec&)> HyperReducedField::column(int i) const
{
  Vec phi = dmd_extrapolate(*dmd_, i, t_, &imag_[i]);
  return [this, phi = std::move(phi)](const Vec& z) {
    Vec v = grad_potential(mesh_, UXd_ * z, phi);
    return Vec(gram_v_ * z + UXd_.transpose() * v.cwiseProduct(deim_->w) / charge_.mp());
  };
}

double HyperReducedField::max_imag_ratio() const
{
  return imag_.empty() ? 0.0 : *std::max_element(imag_.begin(), imag_.end());
}

HyperReducer::HyperReducer(int p_star, int N, const PeriodicMesh& mesh,
                           const ChargeConfig& charge, const HyperReductionOptions& opt)
    : opt_(opt),
      p_star_(p_star),
      mesh_(mesh),
      charge_(charge),
      Mq_(charge.charge_vector()),
      window_(p_star, mesh.nodes, opt.T),
      deim_data_(Mat::Zero(N, static_cast<Eigen::Index>(p_star) * (opt.T + 1))),
      deim_head_(p_star, 0)
{
}

void HyperReducer::push(int j, const Vec& phi, const DepositMatrix& basis)
{
  window_.push(j, phi);
  deim_data_.col(j * (opt_.T + 1) + deim_head_[j]) = basis.apply(phi);
  deim_head_[j] = (deim_head_[j] + 1) % (opt_.T + 1);
}

void HyperReducer::fit(double t_anchor, double dt, const Mat& params_unit,
                       const std::vector<int>& subsample, PhaseTimers* timers)
{
  if (!ready()) throw EvaluationError("hyper-reduction windows are not full yet");
  {
    PhaseTimers::Scope sc(timers, phase::dmd_fit);
    Mat Y, Yp;
    window_.snapshot_pairs(Y, Yp);
    DmdFit f = dmd_fit(Y, Yp, opt_.svd_tol);
    dmd_ = make_dmd_model(f, dt, t_anchor);
    Eigen::CompleteOrthogonalDecomposition<CMat> cod(dmd_.Theta);
    std::vector<CVec> Pi_sub(p_star_);
    for (int j = 0; j < p_star_; ++j)
      Pi_sub[j] = cod.solve(window_.sample(j, opt_.T).cast<cplx>());
    dmd_.Pi = rbf_interpolate_coordinates(params_unit, subsample, Pi_sub);
  }
  {
    PhaseTimers::Scope sc(timers, phase::deim_fit);
    const int cap = std::min<int>(opt_.d, static_cast<int>(std::min(deim_data_.rows(), deim_data_.cols())));
    Mat Psi = deim_basis(deim_data_, cap, opt_.deim_rank_tol);
    const int d_prev = fitted_ ? deim_.d() : opt_.d;
    if (Psi.cols() < d_prev)
      spdlog::warn("DEIM: window data has numerical rank {}, reducing d from {}", Psi.cols(),
                   d_prev);
    if (!fitted_) {
      deim_.Psi = Psi;
      deim_.indices = deim_greedy(Psi);
      deim_.age = 0;
      deim_.full_rebuilds = 1;
      deim_.amplification = deim_amplification(Psi, deim_.indices);
      deim_refresh_weights(deim_, Mq_);
    } else {
      deim_ = deim_update_indices(Psi, deim_, Mq_, opt_.deim);
    }
  }
  fitted_ = true;
  ++fits_;
}

}  // namespace vpsrom
