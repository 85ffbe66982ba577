#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "vpsrom/hyperreduction.hpp"

namespace vpsrom {

namespace {

Mat rows_of(const Mat& A, const std::vector<int>& idx, Eigen::Index ncols)
{
  Mat out(static_cast<Eigen::Index>(idx.size()), ncols);
  for (std::size_t j = 0; j < idx.size(); ++j) out.row(j) = A.row(idx[j]).head(ncols);
  return out;
}

// argmax |r| of the interpolation residual of psi_k against the first k
// vectors at the chosen indices, skipping the excluded rows
int greedy_index(const Mat& Psi, int k, const std::vector<int>& chosen,
                 const std::vector<char>& excluded)
{
  Vec r = Psi.col(k);
  if (k > 0) {
    Mat PtPsi = rows_of(Psi, chosen, k);
    Vec rhs(k);
    for (int j = 0; j < k; ++j) rhs(j) = Psi(chosen[j], k);
    r -= Psi.leftCols(k) * PtPsi.partialPivLu().solve(rhs);
  }
  int best = -1;
  double bv = -1;
  for (Eigen::Index l = 0; l < r.size(); ++l)
    if (!excluded[l] && std::abs(r(l)) > bv) {
      bv = std::abs(r(l));
      best = static_cast<int>(l);
    }
  // a singular partial system leaves r non-finite; any free row will do and
  // the caller's conditioning check forces a rebuild
  for (Eigen::Index l = 0; best < 0 && l < r.size(); ++l)
    if (!excluded[l]) best = static_cast<int>(l);
  return best;
}

int kept_rank(const Vec& s, int d, double rank_tol)
{
  if (s.size() == 0 || !(s(0) > 0)) throw EvaluationError("DEIM: all-zero data");
  int rank = 0;
  while (rank < s.size() && s(rank) >= rank_tol * s(0)) ++rank;
  return std::min(d, rank);
}

}  // namespace

Mat deim_basis(const Mat& Y, int d, double rank_tol)
{
  const Eigen::Index N = Y.rows(), c = Y.cols();
  if (d < 1) throw ConfigError("DEIM: d must be positive");
  if (N <= c) {
    Eigen::BDCSVD<Mat> svd(Y, Eigen::ComputeThinU);
    const Vec& s = svd.singularValues();
    return svd.matrixU().leftCols(kept_rank(s, d, rank_tol));
  }
  // Y = Q R and R = U_r S V^T give the left vectors as Y V S^{-1}, which avoids
  // forming Q; one Cholesky-QR pass removes the round-off of small s
  Eigen::HouseholderQR<Mat> qr(Y);
  Mat R = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Mat> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const int keep = kept_rank(s, d, rank_tol);
  Mat U = Y * (svd.matrixV().leftCols(keep) * s.head(keep).cwiseInverse().asDiagonal());
  Eigen::LLT<Mat> llt(U.transpose() * U);
  if (llt.info() == Eigen::Success) {
    llt.matrixU().solveInPlace<Eigen::OnTheRight>(U);
    return U;
  }
  U = Mat::Zero(N, keep);
  U.topRows(c) = svd.matrixU().leftCols(keep);
  U.applyOnTheLeft(qr.householderQ());
  return U;
}

double deim_amplification(const Mat& Psi, const std::vector<int>& indices)
{
  Eigen::JacobiSVD<Mat> svd(rows_of(Psi, indices, Psi.cols()));
  const Vec& s = svd.singularValues();
  return s.size() && s(s.size() - 1) > 0 ? 1.0 / s(s.size() - 1) : INFINITY;
}

std::vector<int> deim_greedy(const Mat& Psi)
{
  const int d = static_cast<int>(Psi.cols());
  std::vector<int> idx;
  std::vector<char> used(Psi.rows(), 0);
  for (int k = 0; k < d; ++k) {
    int l = greedy_index(Psi, k, idx, used);
    idx.push_back(l);
    used[l] = 1;
  }
  return idx;
}

void deim_refresh_weights(DeimModel& m, const Vec& Mq)
{
  Mat PtPsi = rows_of(m.Psi, m.indices, m.Psi.cols());
  m.w = PtPsi.transpose().partialPivLu().solve(m.Psi.transpose() * Mq);
}

Vec DeimModel::interpolate(const Vec& F) const
{
  Mat PtPsi = rows_of(Psi, indices, Psi.cols());
  Vec f(d());
  for (int j = 0; j < d(); ++j) f(j) = F(indices[j]);
  return Psi * PtPsi.partialPivLu().solve(f);
}

DeimModel deim_fit(const Mat& Y, int d, const Vec& Mq, double rank_tol)
{
  if (d > std::min(Y.rows(), Y.cols()))
    throw ConfigError("DEIM: d = " + std::to_string(d) + " exceeds the data size");
  DeimModel m;
  m.Psi = deim_basis(Y, d, rank_tol);
  if (m.Psi.cols() < d)
    spdlog::warn("DEIM: data has numerical rank {}, reducing d from {}", m.Psi.cols(), d);
  m.indices = deim_greedy(m.Psi);
  deim_refresh_weights(m, Mq);
  m.full_rebuilds = 1;
  m.amplification = deim_amplification(m.Psi, m.indices);
  return m;
}

DeimModel deim_update_indices(const Mat& Psi_new, const DeimModel& old, const Vec& Mq,
                              const DeimUpdateOptions& opt)
{
  const int d = static_cast<int>(Psi_new.cols());
  DeimModel m;
  m.Psi = Psi_new;
  m.full_rebuilds = old.full_rebuilds;
  auto rebuild = [&] {
    m.indices = deim_greedy(m.Psi);
    m.age = 0;
    ++m.full_rebuilds;
    m.amplification = deim_amplification(m.Psi, m.indices);
    deim_refresh_weights(m, Mq);
    return m;
  };
  if (d != old.d() || Psi_new.rows() != old.Psi.rows() || old.age + 1 >= opt.k_deim ||
      opt.n_update >= d)
    return rebuild();

  // singular vectors are defined up to sign, so alignment uses |<.,.>|
  Vec align = (Psi_new.array() * old.Psi.array()).colwise().sum().abs().transpose();
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return opt.most_aligned ? align(a) > align(b) : align(a) < align(b);
  });
  std::vector<char> affected(d, 0);
  for (int j = 0; j < opt.n_update; ++j) affected[order[j]] = 1;

  std::vector<char> used(Psi_new.rows(), 0);
  for (int k = 0; k < d; ++k)
    if (!affected[k]) used[old.indices[k]] = 1;
  for (int k = 0; k < d; ++k) {
    if (!affected[k]) {
      m.indices.push_back(old.indices[k]);
      continue;
    }
    int l = greedy_index(m.Psi, k, m.indices, used);
    m.indices.push_back(l);
    used[l] = 1;
  }
  if (!(deim_amplification(m.Psi, m.indices) <= opt.amplification_limit * old.amplification))
    return rebuild();
  m.age = old.age + 1;
  m.amplification = old.amplification;
  deim_refresh_weights(m, Mq);
  return m;
}

}  // namespace vpsrom
