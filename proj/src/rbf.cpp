#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "vpsrom/hyperreduction.hpp"

namespace vpsrom {

RbfInterpolator::RbfInterpolator(const Mat& nodes, double eps) : nodes_(nodes), eps_(eps)
{
  const Eigen::Index m = nodes.rows(), dim = nodes.cols();
  if (m < 1) throw ConfigError("RBF: no nodes");
  std::vector<double> dist;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) dist.push_back((nodes.row(i) - nodes.row(j)).norm());
  if (m == 1) {
    nearest_ = true;
    return;
  }
  if (!(eps_ > 0)) {
    std::nth_element(dist.begin(), dist.begin() + dist.size() / 2, dist.end());
    double med = dist[dist.size() / 2];
    if (dist.size() % 2 == 0) {
      double lo = *std::max_element(dist.begin(), dist.begin() + dist.size() / 2);
      med = 0.5 * (med + lo);
    }
    eps_ = med > 0 ? 1.0 / med : 0.0;
  }
  if (!(eps_ > 0) || *std::min_element(dist.begin(), dist.end()) == 0) {
    spdlog::warn("RBF: coincident nodes, falling back to nearest-neighbour interpolation");
    nearest_ = true;
    return;
  }

  Mat K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) K.row(i) = kernel_row(nodes.row(i)).transpose();

  if (m >= dim + 2) {
    Mat P(m, dim + 1);
    P.col(0).setOnes();
    P.rightCols(dim) = nodes;
    Eigen::ColPivHouseholderQR<Mat> qr(P);
    qr.setThreshold(1e-10);
    if (qr.rank() == dim + 1) {
      Mat A = Mat::Zero(m + dim + 1, m + dim + 1);
      A.topLeftCorner(m, m) = K;
      A.topRightCorner(m, dim + 1) = P;
      A.bottomLeftCorner(dim + 1, m) = P.transpose();
      lu_.compute(A);
      if (lu_.rcond() > 1e-14) {
        tail_ = true;
        return;
      }
    }
  }
  lu_.compute(K);
  if (!(lu_.rcond() > 1e-14)) {
    spdlog::warn("RBF: singular interpolation matrix, falling back to nearest neighbour");
    nearest_ = true;
  }
}

Vec RbfInterpolator::kernel_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const
{
  Vec k(nodes_.rows());
  for (Eigen::Index j = 0; j < nodes_.rows(); ++j) {
    const double r = eps_ * (nodes_.row(j) - x).norm();
    k(j) = std::exp(-r * r);
  }
  return k;
}

Mat RbfInterpolator::interpolate(const Mat& values, const Mat& queries) const
{
  const Eigen::Index m = nodes_.rows(), dim = nodes_.cols(), q = queries.rows();
  if (values.rows() != m) throw ConfigError("RBF: values must have one row per node");
  Mat out(q, values.cols());
  if (nearest_) {
    for (Eigen::Index i = 0; i < q; ++i) {
      Eigen::Index j;
      (nodes_.rowwise() - queries.row(i)).rowwise().squaredNorm().minCoeff(&j);
      out.row(i) = values.row(j);
    }
    return out;
  }
  const Eigen::Index extra = tail_ ? dim + 1 : 0;
  Mat rhs = Mat::Zero(m + extra, values.cols());
  rhs.topRows(m) = values;
  Mat coef = lu_.solve(rhs);
  for (Eigen::Index i = 0; i < q; ++i) {
    Vec row(m + extra);
    row.head(m) = kernel_row(queries.row(i));
    if (tail_) {
      row(m) = 1;
      row.segment(m + 1, dim) = queries.row(i).transpose();
    }
    out.row(i) = row.transpose() * coef;
  }
  return out;
}

CMat RbfInterpolator::interpolate(const CMat& values, const Mat& queries) const
{
  CMat out(queries.rows(), values.cols());
  out.real() = interpolate(Mat(values.real()), queries);
  out.imag() = interpolate(Mat(values.imag()), queries);
  return out;
}

std::vector<CVec> rbf_interpolate_coordinates(const Mat& params, const std::vector<int>& subsample,
                                              const std::vector<CVec>& Pi_sub)
{
  const Eigen::Index m = static_cast<Eigen::Index>(subsample.size());
  if (m == 0 || Pi_sub.size() != subsample.size())
    throw ConfigError("RBF: subsample and coordinates disagree");
  const Eigen::Index r = Pi_sub[0].size();
  Mat nodes(m, params.cols());
  CMat vals(m, r);
  for (Eigen::Index j = 0; j < m; ++j) {
    nodes.row(j) = params.row(subsample[j]);
    vals.row(j) = Pi_sub[j].transpose();
  }
  RbfInterpolator rbf(nodes);
  CMat all = rbf.interpolate(vals, params);
  std::vector<CVec> out(params.rows());
  for (Eigen::Index i = 0; i < params.rows(); ++i) out[i] = all.row(i).transpose();
  for (Eigen::Index j = 0; j < m; ++j) out[subsample[j]] = Pi_sub[j];
  return out;
}

}  // namespace vpsrom
