#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "dense.hpp"
#include "vpsrom/diagnostics.hpp"
#include "vpsrom/symplectic.hpp"
#include "vpsrom/timers.hpp"

using namespace vpsrom;

TEST_CASE("relative errors")
{
  std::mt19937_64 rng(1);
  Mat X = oracle::random_matrix(20, 5, rng), V = oracle::random_matrix(20, 5, rng);
  StateErrors e = relative_errors(X, V, X, V);
  CHECK(e.X == 0.0);
  CHECK(e.V == 0.0);
  StateErrors z = relative_errors(X, V, Mat::Zero(20, 5), Mat::Zero(20, 5));
  CHECK(z.X == doctest::Approx(1.0));
  CHECK(z.V == doctest::Approx(1.0));
  Mat D = oracle::random_matrix(20, 5, rng);
  D *= 1e-3 * X.norm() / D.norm();
  CHECK(relative_errors(X, V, X + D, V).X == doctest::Approx(1e-3));
  CHECK(relative_errors(Mat::Zero(20, 5), V, X, V).undefined);
  CHECK_THROWS_AS(relative_errors(X, V, X.leftCols(2), V), ConfigError);
}

TEST_CASE("target projection errors")
{
  std::mt19937_64 rng(2);
  const int N = 30, p = 10;
  // exact complex rank 2
  CMat A(N, 2), B(2, p);
  A.real() = oracle::random_matrix(N, 2, rng);
  A.imag() = oracle::random_matrix(N, 2, rng);
  B.real() = oracle::random_matrix(2, p, rng);
  B.imag() = oracle::random_matrix(2, p, rng);
  CMat C = A * B;
  StateErrors t = target_projection_errors(C.real(), C.imag(), 4);
  CHECK(t.X < 1e-10);
  CHECK(t.V < 1e-10);
  Mat X = oracle::random_matrix(N, p, rng), V = oracle::random_matrix(N, p, rng);
  StateErrors f = target_projection_errors(X, V, 2 * p);
  CHECK(f.X < 1e-10);
  CHECK(f.V < 1e-10);

  // random complex rank 5 with known singular values, n = 4 keeps two
  CMat Q1 = CMat::Zero(N, 5), Q2 = CMat::Zero(p, 5);
  {
    CMat G(N, 5), H(p, 5);
    G.real() = oracle::random_matrix(N, 5, rng);
    G.imag() = oracle::random_matrix(N, 5, rng);
    H.real() = oracle::random_matrix(p, 5, rng);
    H.imag() = oracle::random_matrix(p, 5, rng);
    Q1 = G.householderQr().householderQ() * CMat::Identity(N, 5);
    Q2 = H.householderQr().householderQ() * CMat::Identity(p, 5);
  }
  Vec s(5);
  s << 10, 5, 2, 1, 0.5;
  CMat R = Q1 * s.cast<cplx>().asDiagonal() * Q2.adjoint();
  StateErrors r = target_projection_errors(R.real(), R.imag(), 4);
  const double tail = std::sqrt(s.tail(3).squaredNorm() / s.squaredNorm());
  CHECK(r.total == doctest::Approx(tail).epsilon(1e-10));

  // measured error of any n-dimensional ortho-symplectic fit is at least the target
  Mat U = oracle::random_orthosymplectic(N, 4, rng);
  Mat W(2 * N, p);
  W << X, V;
  Mat Zr = U.transpose() * W;
  StateErrors m = relative_errors(X, V, U.topRows(N) * Zr, U.bottomRows(N) * Zr);
  CHECK(m.total >= target_projection_errors(X, V, 4).total - 1e-12);
}

TEST_CASE("numerical rank")
{
  CHECK(numerical_rank(Mat::Identity(5, 5), 0.5) == 5);
  Mat D = Vec((Vec(3) << 1, 1e-3, 1e-6).finished()).asDiagonal();
  CHECK(numerical_rank(D, 1e-4) == 2);
  CHECK(numerical_rank(Mat::Zero(4, 3), 1e-4) == 0);
  CHECK(numerical_rank(1e8 * D, 1e-4) == 2);
}

TEST_CASE("Hamiltonian error decomposition")
{
  std::mt19937_64 rng(3);
  Mat U = oracle::random_orthosymplectic(10, 4, rng);
  Mat Z = oracle::random_matrix(4, 3, rng);
  auto H = [](const Mat& U, const Vec& z, int) { return (U * z).squaredNorm() + (U * z).sum(); };
  HamiltonianSplit s = hamiltonian_error_decomposition(U, U, U, Z, Z, 0, 1, H, nullptr);
  CHECK(s.dH == 0.0);
  CHECK(s.dHZ == 0.0);
  CHECK(std::isnan(s.dHZdd));

  Mat Z2 = Z + 0.1 * oracle::random_matrix(4, 3, rng);
  Mat U2 = oracle::random_orthosymplectic(10, 4, rng);
  HddFn same = [&](const Vec& z, int i, double) { return H(U, z, i); };
  HamiltonianSplit t = hamiltonian_error_decomposition(U, U, U2, Z, Z2, 0, 1, H, same);
  CHECK(t.dHZ == doctest::Approx(t.dHZdd));
  CHECK(t.dH > 0);

  Vec a(3), b(3);
  a << 1, 2, 2;
  b << 1, 2, 2.3;
  CHECK(hamiltonian_relative_error(a, b) == doctest::Approx(0.1));
}

TEST_CASE("energy rate fit")
{
  const double gamma = 0.15, w = 1.4;
  std::vector<double> t, E, E2, C;
  for (int k = 0; k <= 20000; ++k) {
    const double s = k * 0.001;
    t.push_back(s);
    E.push_back(std::exp(-2 * gamma * s) * std::pow(std::cos(w * s), 2));
    E2.push_back(37.0 * E.back());
    C.push_back(2.5);
  }
  RateFit f = fit_energy_rate(t, E, RateMode::damping);
  CHECK(f.rate == doctest::Approx(-2 * gamma).epsilon(0.01));
  CHECK(std::abs(fit_energy_rate(t, E2, RateMode::damping).rate - f.rate) < 1e-12);
  CHECK(fit_energy_rate(t, C, RateMode::damping).rate == 0.0);

  std::vector<double> G;
  for (double s : t) G.push_back(std::exp(0.2 * s) * (1.5 + std::cos(3 * s)));
  CHECK(fit_energy_rate(t, G, RateMode::growth).rate == doctest::Approx(0.2).epsilon(0.01));

  // windows restrict the peaks
  RateFit part = fit_energy_rate(t, E, RateMode::damping, 5.0, 15.0);
  for (double p : part.peak_t) {
    CHECK(p >= 5.0);
    CHECK(p <= 15.0);
  }

  std::vector<double> few(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) few[k] = std::exp(-std::pow(t[k] - 10, 2));
  try {
    fit_energy_rate(t, few, RateMode::damping);
    FAIL("expected a fit failure");
  } catch (const RateFitError& e) {
    CHECK(e.peaks == 1);
  }
}

TEST_CASE("phase timers")
{
  PhaseTimers p;
  CHECK(p.total(phase::rom_basis) == 0.0);
  CHECK(p.count(phase::rom_basis) == 0);
  {
    PhaseTimers::Scope a(&p, "a");
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  {
    PhaseTimers::Scope b(&p, "b");
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  CHECK(p.total("a") == doctest::Approx(0.010).epsilon(0.5));
  CHECK(p.total("b") == doctest::Approx(0.010).epsilon(0.5));

  // nesting charges exclusive time
  PhaseTimers q;
  {
    PhaseTimers::Scope o(&q, "outer");
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
    {
      PhaseTimers::Scope i(&q, "inner");
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }
  CHECK(q.total("outer") < 0.018);
  CHECK(q.total("inner") >= 0.019);
  p.merge(q);
  CHECK(p.count("inner") == 1);
  p.reset();
  CHECK(p.totals().empty());
  PhaseTimers::Scope none(nullptr, "x");
}
