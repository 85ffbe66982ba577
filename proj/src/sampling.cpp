#include "vpsrom/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>

namespace vpsrom {

std::string to_string(BenchmarkKind k)
{
  switch (k) {
    case BenchmarkKind::weak_landau: return "weak_landau";
    case BenchmarkKind::nonlinear_landau: return "nonlinear_landau";
    case BenchmarkKind::two_stream: return "two_stream";
  }
  return "unknown";
}

BenchmarkKind benchmark_from_string(const std::string& s)
{
  if (s == "weak_landau" || s == "ld") return BenchmarkKind::weak_landau;
  if (s == "nonlinear_landau" || s == "nld") return BenchmarkKind::nonlinear_landau;
  if (s == "two_stream" || s == "tsi") return BenchmarkKind::two_stream;
  throw ConfigError("unknown benchmark '" + s + "'");
}

bool ParamBox::contains(double alpha, double sigma, double tol) const
{
  return alpha >= alpha_lo - tol && alpha <= alpha_hi + tol && sigma >= sigma_lo - tol &&
         sigma <= sigma_hi + tol;
}

double BenchmarkSpec::domain_length() const { return 2 * std::numbers::pi / k; }

void BenchmarkSpec::validate() const
{
  auto req = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("benchmark: " + what);
  };
  req(k > 0, "wavenumber must be positive");
  req(gamma.alpha_lo <= gamma.alpha_hi && gamma.sigma_lo <= gamma.sigma_hi,
      "parameter box is empty");
  req(gamma.sigma_lo > 0, "sigma must be positive");
  req(std::abs(gamma.alpha_lo) < 1 && std::abs(gamma.alpha_hi) < 1, "|alpha| must be < 1");
  req(N > 0 && Nx >= 3 && p > 0 && n > 0 && d > 0 && p_star > 0 && T > 0, "counts must be positive");
  req(k_deim > 0 && n_update >= 0, "DEIM update settings must be positive");
  req(n % 2 == 0, "n must be even, got " + std::to_string(n));
  req(dt > 0 && t_final > 0, "dt and t_final must be positive");
  req(p_star <= p, "p* must not exceed p");
  req(d <= N, "d must not exceed N");
  req(n <= 2 * std::min(N, p), "n exceeds 2 min(N, p)");
}

BenchmarkSpec benchmark_defaults(BenchmarkKind kind)
{
  BenchmarkSpec s;
  s.kind = kind;
  switch (kind) {
    case BenchmarkKind::weak_landau:
      s.k = 0.5;
      s.gamma = {0.03, 0.06, 0.8, 1.0};
      s.N = 50000;
      s.Nx = 32;
      s.dt = 0.0025;
      s.t_final = 20;
      s.p = 300;
      s.n = 4;
      s.d = 32;
      s.n_update = 12;
      s.k_deim = 3;
      break;
    case BenchmarkKind::nonlinear_landau:
      s.k = 0.5;
      s.gamma = {0.46, 0.5, 0.96, 1.0};
      s.N = 100000;
      s.Nx = 64;
      s.dt = 0.002;
      s.t_final = 40;
      s.p = 300;
      s.n = 6;
      s.d = 32;
      s.p_star = 8;
      break;
    case BenchmarkKind::two_stream:
      s.k = 0.2;
      s.v0 = 3;
      s.gamma = {0.009, 0.011, 0.98, 1.02};
      s.N = 150000;
      s.Nx = 64;
      s.dt = 0.0025;
      s.t_final = 20;
      s.p = 300;
      s.n = 4;
      break;
  }
  return s;
}

double radical_inverse2(std::uint64_t l)
{
  double r = 0, f = 0.5;
  while (l) {
    if (l & 1) r += f;
    f *= 0.5;
    l >>= 1;
  }
  return r;
}

Mat hammersley(int count, int dims)
{
  if (count < 1) throw ConfigError("hammersley: count must be >= 1");
  if (dims < 1 || dims > 2) throw ConfigError("hammersley: dims must be 1 or 2");
  Mat H(count, dims);
  for (int l = 0; l < count; ++l) {
    H(l, 0) = static_cast<double>(l) / count;
    if (dims == 2) H(l, 1) = radical_inverse2(static_cast<std::uint64_t>(l));
  }
  return H;
}

double cdf_position(double x, double alpha, double k, double domain_length)
{
  return (x + alpha / k * std::sin(k * x)) / domain_length;
}

double inverse_cdf_position(double u, double alpha, double k, double domain_length)
{
  if (u <= 0) return 0;
  if (alpha == 0) return u * domain_length;
  auto f = [&](double x) {
    return std::make_pair(cdf_position(x, alpha, k, domain_length) - u,
                          (1 + alpha * std::cos(k * x)) / domain_length);
  };
  std::uintmax_t it = 200;
  return boost::math::tools::newton_raphson_iterate(f, u * domain_length, 0.0, domain_length,
                                                    std::numeric_limits<double>::digits - 2, it);
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_pdf(double x)
{
  return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi);
}

}  // namespace

double erfinv(double y) { return boost::math::erf_inv(y); }

double cdf_velocity(double v, BenchmarkKind kind, double sigma, double v0)
{
  if (kind != BenchmarkKind::two_stream) return normal_cdf(v / sigma);
  return 0.5 * (normal_cdf((v - v0) / sigma) + normal_cdf((v + v0) / sigma));
}

double inverse_cdf_velocity(double u, BenchmarkKind kind, double sigma, double v0)
{
  if (!(u > 0 && u < 1)) throw ConfigError("inverse_cdf_velocity: u must lie in (0,1)");
  if (kind != BenchmarkKind::two_stream)
    return sigma * std::numbers::sqrt2 * erfinv(2 * u - 1);
  if (u == 0.5) return 0.0;
  auto f = [&](double v) {
    double pdf = 0.5 / sigma * (normal_pdf((v - v0) / sigma) + normal_pdf((v + v0) / sigma));
    return std::make_pair(cdf_velocity(v, kind, sigma, v0) - u, pdf);
  };
  // outer quantiles of the mixture bracket the root
  boost::math::normal_distribution<double> g(0.0, sigma);
  double lo = -v0 + boost::math::quantile(g, std::min(u, 0.5)) - sigma;
  double hi = v0 + boost::math::quantile(g, std::max(u, 0.5)) + sigma;
  double guess = u < 0.5 ? -v0 + boost::math::quantile(g, std::min(2 * u, 1 - 1e-16))
                         : v0 + boost::math::quantile(g, std::max(2 * u - 1, 1e-300));
  guess = std::clamp(guess, lo, hi);
  std::uintmax_t it = 200;
  return boost::math::tools::newton_raphson_iterate(f, guess, lo, hi,
                                                    std::numeric_limits<double>::digits - 2, it);
}

namespace {

void check_params(const BenchmarkSpec& spec, const Mat& params)
{
  if (params.cols() != 2) throw ConfigError("parameters must be p x 2 (alpha, sigma)");
  for (Eigen::Index i = 0; i < params.rows(); ++i)
    if (!spec.gamma.contains(params(i, 0), params(i, 1)))
      throw ConfigError("parameter " + std::to_string(i) + " lies outside the parameter box");
}

// U column 0 drives the velocities, column 1 the positions
ParticleEnsemble load(const BenchmarkSpec& spec, const Mat& params, const Mat& U)
{
  const int N = static_cast<int>(U.rows());
  const Eigen::Index p = params.rows();
  const double len = spec.domain_length();
  ParticleEnsemble e;
  e.X.resize(N, p);
  e.V.resize(N, p);
  e.charge = make_charge(build_mesh(len, spec.Nx), N);
  auto vel_u = [&](int l) { return U(l, 0) <= 0 ? 0.5 / N : U(l, 0); };
  // the Maxwellian quantile scales with sigma, so one unit-variance pass suffices
  Vec unit;
  if (spec.kind != BenchmarkKind::two_stream) {
    unit.resize(N);
    for (int l = 0; l < N; ++l) unit(l) = inverse_cdf_velocity(vel_u(l), spec.kind, 1.0);
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    const double alpha = params(i, 0), sigma = params(i, 1);
    for (int l = 0; l < N; ++l) {
      e.X(l, i) = inverse_cdf_position(U(l, 1), alpha, spec.k, len);
      e.V(l, i) = unit.size() ? sigma * unit(l)
                              : inverse_cdf_velocity(vel_u(l), spec.kind, sigma, spec.v0);
    }
  }
  return e;
}

}  // namespace

ParticleEnsemble build_initial_ensemble(const BenchmarkSpec& spec, const Mat& params)
{
  check_params(spec, params);
  // the stratified coordinate goes to the velocities, shifted to cell midpoints so
  // the Maxwellian quantile stays finite
  Mat H = hammersley(spec.N, 2);
  H.col(0).array() += 0.5 / spec.N;
  return load(spec, params, H);
}

ParticleEnsemble build_random_ensemble(const BenchmarkSpec& spec, const Mat& params,
                                       std::uint64_t seed)
{
  check_params(spec, params);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Mat U(spec.N, 2);
  for (int l = 0; l < spec.N; ++l) {
    U(l, 0) = unif(rng);
    U(l, 1) = unif(rng);
  }
  return load(spec, params, U);
}

Mat sample_parameters(const ParamBox& gamma, int p)
{
  Mat H = hammersley(p, 2);
  Mat P(p, 2);
  P.col(0) = (gamma.alpha_lo + (gamma.alpha_hi - gamma.alpha_lo) * H.col(0).array()).matrix();
  P.col(1) = (gamma.sigma_lo + (gamma.sigma_hi - gamma.sigma_lo) * H.col(1).array()).matrix();
  return P;
}

}  // namespace vpsrom
