#include "vpsrom/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "vpsrom/symplectic.hpp"

namespace vpsrom {

StateErrors relative_errors(const Mat& SX, const Mat& SV, const Mat& Xr, const Mat& Vr)
{
  if (SX.rows() != Xr.rows() || SX.cols() != Xr.cols() || SV.rows() != Vr.rows() ||
      SV.cols() != Vr.cols())
    throw ConfigError("relative_errors: shape mismatch");
  StateErrors e;
  const double nx = SX.norm(), nv = SV.norm();
  const double dx = (SX - Xr).norm(), dv = (SV - Vr).norm();
  e.undefined = nx == 0 || nv == 0;
  e.X = nx > 0 ? dx / nx : NAN;
  e.V = nv > 0 ? dv / nv : NAN;
  const double nt = std::hypot(nx, nv);
  e.total = nt > 0 ? std::hypot(dx, dv) / nt : NAN;
  return e;
}

StateErrors target_projection_errors(const Mat& SX, const Mat& SV, int n)
{
  if (n <= 0 || n % 2) throw ConfigError("target errors: n must be positive and even");
  CMat C(SX.rows(), SX.cols());
  C.real() = SX;
  C.imag() = SV;
  const int k = std::min<int>(n / 2, static_cast<int>(std::min(C.rows(), C.cols())));
  CMat Q = leading_left_singular_vectors(C, k);
  CMat R = C - Q * (Q.adjoint() * C);
  StateErrors e;
  const double nx = SX.norm(), nv = SV.norm();
  const double dx = R.real().norm(), dv = R.imag().norm();
  e.undefined = nx == 0 || nv == 0;
  e.X = nx > 0 ? dx / nx : NAN;
  e.V = nv > 0 ? dv / nv : NAN;
  const double nt = std::hypot(nx, nv);
  e.total = nt > 0 ? std::hypot(dx, dv) / nt : NAN;
  return e;
}

int numerical_rank(const Mat& S, double tol)
{
  if (S.size() == 0) return 0;
  Eigen::BDCSVD<Mat> svd(S);
  const Vec& s = svd.singularValues();
  if (!(s(0) > 0)) return 0;
  int r = 0;
  while (r < s.size() && s(r) >= tol * s(0)) ++r;
  return r;
}

HamiltonianSplit hamiltonian_error_decomposition(const Mat& U_prev, const Mat& U_half,
                                                 const Mat& U_next, const Mat& Z_prev,
                                                 const Mat& Z_next, double t_prev, double t_next,
                                                 const HamiltonianFn& H, const HddFn& Hdd)
{
  const Eigen::Index p = Z_prev.cols();
  Vec a(p), b(p), c(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const int ii = static_cast<int>(i);
    a(i) = H(U_next, Z_next.col(i), ii) - H(U_prev, Z_prev.col(i), ii);
    b(i) = H(U_half, Z_next.col(i), ii) - H(U_half, Z_prev.col(i), ii);
    c(i) = Hdd ? Hdd(Z_next.col(i), ii, t_next) - Hdd(Z_prev.col(i), ii, t_prev) : NAN;
  }
  return {a.norm(), b.norm(), c.norm()};
}

double hamiltonian_relative_error(const Vec& H_ref, const Vec& H)
{
  return (H_ref - H).norm() / H_ref.norm();
}

RateFit fit_energy_rate(const std::vector<double>& t, const std::vector<double>& E, RateMode mode,
                        double t_lo, double t_hi)
{
  (void)mode;  // the slope's sign carries the regime; the mode only labels it
  if (t.size() != E.size()) throw ConfigError("fit_energy_rate: t and E lengths differ");
  std::vector<std::size_t> win;
  for (std::size_t j = 0; j < t.size(); ++j)
    if (t[j] >= t_lo && t[j] <= t_hi) win.push_back(j);
  if (win.empty()) throw RateFitError("fit_energy_rate: empty window", 0);
  double emax = -INFINITY, emin = INFINITY;
  for (auto j : win) {
    emax = std::max(emax, E[j]);
    emin = std::min(emin, E[j]);
  }
  if (emax > 0 && emax - emin <= 1e-14 * emax) return {};  // flat series

  const std::size_t a = win.front(), b = win.back();
  std::vector<std::size_t> peaks;
  for (std::size_t j = std::max<std::size_t>(a, 1); j + 1 <= b && j + 1 < E.size(); ++j) {
    if (!(E[j] > E[j - 1] && E[j] > E[j + 1])) continue;
    // topographic prominence inside the window
    double lmin = E[j], rmin = E[j];
    for (std::size_t l = j; l-- > a;) {
      if (E[l] > E[j]) break;
      lmin = std::min(lmin, E[l]);
    }
    for (std::size_t r = j + 1; r <= b; ++r) {
      if (E[r] > E[j]) break;
      rmin = std::min(rmin, E[r]);
    }
    if (E[j] - std::max(lmin, rmin) >= 1e-3 * emax) peaks.push_back(j);
  }
  if (peaks.size() < 3)
    throw RateFitError("fit_energy_rate: found " + std::to_string(peaks.size()) +
                           " peaks, need at least 3",
                       static_cast<int>(peaks.size()));

  RateFit fit;
  for (std::size_t q = 1; q < peaks.size(); ++q) {
    const std::size_t j = peaks[q];
    if (E[j - 1] <= 0 || E[j] <= 0 || E[j + 1] <= 0) continue;
    // parabola through the three log samples around the discrete maximum
    const double y0 = std::log(E[j - 1]), y1 = std::log(E[j]), y2 = std::log(E[j + 1]);
    const double h = 0.5 * (t[j + 1] - t[j - 1]);
    const double den = y0 - 2 * y1 + y2;
    double s = den < 0 ? 0.5 * (y0 - y2) / den : 0.0;
    s = std::clamp(s, -1.0, 1.0);
    fit.peak_t.push_back(t[j] + s * h);
    fit.peak_logE.push_back(y1 - 0.25 * (y0 - y2) * s);
  }
  if (fit.peak_t.size() < 2) throw RateFitError("fit_energy_rate: not enough positive peaks", 0);
  const Eigen::Index m = static_cast<Eigen::Index>(fit.peak_t.size());
  Mat A(m, 2);
  Vec y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    A(i, 0) = 1;
    A(i, 1) = fit.peak_t[i];
    y(i) = fit.peak_logE[i];
  }
  fit.rate = A.colPivHouseholderQr().solve(y)(1);
  return fit;
}

}  // namespace vpsrom
