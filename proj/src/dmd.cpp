#include <cmath>

#include <spdlog/spdlog.h>

#include "vpsrom/hyperreduction.hpp"

namespace vpsrom {

DmdFit dmd_fit(const Mat& Y, const Mat& Yp, double svd_tol)
{
  if (Y.cols() < 1) throw EvaluationError("dmd_fit: empty data");
  if (Y.rows() != Yp.rows() || Y.cols() != Yp.cols())
    throw EvaluationError("dmd_fit: Y and Y' shapes differ");
  if (!(svd_tol > 0)) throw ConfigError("dmd_fit: svd_tol must be positive");

  Eigen::BDCSVD<Mat> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || !(s(0) > 0)) throw EvaluationError("dmd_fit: all-zero data");
  int r = 0;
  while (r < s.size() && s(r) >= svd_tol * s(0)) ++r;

  Mat Ur = svd.matrixU().leftCols(r);
  Mat VSinv = svd.matrixV().leftCols(r) * s.head(r).cwiseInverse().asDiagonal();
  Mat YpVS = Yp * VSinv;
  Mat Atil = Ur.transpose() * YpVS;
  Eigen::EigenSolver<Mat> es(Atil);
  if (es.info() != Eigen::Success) throw EvaluationError("dmd_fit: eigendecomposition failed");

  DmdFit f;
  f.sigma = s;
  f.rank = r;
  f.lambda = es.eigenvalues();
  f.modes = YpVS.cast<cplx>() * es.eigenvectors();
  return f;
}

CVec dmd_coordinates(const CMat& Theta, const Vec& phi)
{
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(Theta);
  return cod.solve(phi.cast<cplx>());
}

DmdModel make_dmd_model(const DmdFit& fit, double dt, double t_anchor, double min_abs)
{
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < fit.lambda.size(); ++j)
    if (std::abs(fit.lambda(j)) >= min_abs) keep.push_back(j);
  if (keep.empty()) throw EvaluationError("DMD: every eigenvalue vanished");
  DmdModel m;
  m.t_anchor = t_anchor;
  m.Theta.resize(fit.modes.rows(), static_cast<Eigen::Index>(keep.size()));
  m.omega.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    m.Theta.col(j) = fit.modes.col(keep[j]);
    m.omega(j) = std::log(fit.lambda(keep[j])) / dt;
  }
  return m;
}

Vec dmd_extrapolate(const DmdModel& model, int i, double t, double* imag_ratio)
{
  const CVec& Pi = model.Pi.at(i);
  CVec e = (model.omega * cplx(t - model.t_anchor)).array().exp();
  CVec c = model.Theta * (Pi.array() * e.array()).matrix();
  Vec re = c.real();
  if (imag_ratio) {
    const double nr = re.norm();
    *imag_ratio = nr > 0 ? c.imag().norm() / nr : (c.imag().norm() > 0 ? INFINITY : 0.0);
  }
  return re;
}

DmdWindow::DmdWindow(int num_series, int nx, int T)
    : T_(T), buf_(num_series, Mat::Zero(nx, T + 1)), head_(num_series, 0), count_(num_series, 0)
{
  if (T < 1) throw ConfigError("DMD window length T must be >= 1");
}

void DmdWindow::push(int series, const Vec& phi)
{
  buf_.at(series).col(head_[series]) = phi;
  head_[series] = (head_[series] + 1) % (T_ + 1);
  count_[series] = std::min(count_[series] + 1, T_ + 1);
}

bool DmdWindow::full() const
{
  for (int c : count_)
    if (c < T_ + 1) return false;
  return !count_.empty();
}

Vec DmdWindow::sample(int series, int j) const
{
  const int cap = T_ + 1;
  const int start = (head_[series] - count_[series] + cap) % cap;
  return buf_[series].col((start + j) % cap);
}

void DmdWindow::snapshot_pairs(Mat& Y, Mat& Yp) const
{
  const int S = static_cast<int>(buf_.size());
  const Eigen::Index nx = buf_.empty() ? 0 : buf_[0].rows();
  Y.resize(nx, S * T_);
  Yp.resize(nx, S * T_);
  for (int s = 0; s < S; ++s)
    for (int j = 0; j < T_; ++j) {
      Y.col(s * T_ + j) = sample(s, j);
      Yp.col(s * T_ + j) = sample(s, j + 1);
    }
}

}  // namespace vpsrom
