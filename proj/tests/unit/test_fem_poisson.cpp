#include <doctest.h>

#include <cmath>
#include <random>

#include "dense.hpp"
#include "vpsrom/fem_poisson.hpp"
#include "vpsrom/pic.hpp"

using namespace vpsrom;

namespace {

Vec random_positions(int n, double length, std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(0, length);
  Vec x(n);
  for (int i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

}  // namespace

TEST_CASE("build_mesh spacing and validation")
{
  PeriodicMesh m = build_mesh(2 * M_PI, 4);
  CHECK(m.h == doctest::Approx(M_PI / 2));
  CHECK(m.node(3) == doctest::Approx(1.5 * M_PI));
  CHECK(build_mesh(4 * M_PI, 32).h == doctest::Approx(M_PI / 8));
  CHECK(build_mesh(10 * M_PI, 64).h == doctest::Approx(10 * M_PI / 64));
  CHECK_THROWS_AS(build_mesh(1.0, 2), ConfigError);
  CHECK_THROWS_AS(build_mesh(-1.0, 8), ConfigError);
}

TEST_CASE("stiffness matrix")
{
  PoissonOperator op(build_mesh(4.0, 4));
  const Mat& L = op.stiffness();
  Mat expect(4, 4);
  expect << 2, -1, 0, -1, -1, 2, -1, 0, 0, -1, 2, -1, -1, 0, -1, 2;
  CHECK((L - expect).norm() < 1e-14);

  PeriodicMesh m = build_mesh(4 * M_PI, 32);
  PoissonOperator op2(m);
  CHECK((op2.stiffness() * Vec::Ones(32)).norm() < 1e-12);
  CHECK((op2.stiffness() - op2.stiffness().transpose()).norm() == 0.0);
  CHECK((op2.stiffness() - oracle::stiffness(m)).norm() < 1e-12);
}

TEST_CASE("basis evaluation")
{
  PeriodicMesh m = build_mesh(2 * M_PI, 8);
  Vec x(4);
  x << m.node(3), 0.5 * m.h, m.length + 0.25 * m.h, 0.25 * m.h;
  Mat B = eval_basis(m, x).to_dense();
  CHECK(B(0, 3) == doctest::Approx(1.0));
  CHECK(B.row(0).sum() == doctest::Approx(1.0));
  CHECK(B(1, 0) == doctest::Approx(0.5));
  CHECK(B(1, 1) == doctest::Approx(0.5));
  CHECK((B.row(2) - B.row(3)).norm() < 1e-12);

  std::mt19937_64 rng(1);
  Vec r = random_positions(50, 3 * m.length, rng).array() - m.length;
  Mat D = eval_basis(m, r).to_dense();
  CHECK((D.rowwise().sum().array() - 1).abs().maxCoeff() < 1e-14);
  CHECK(D.minCoeff() >= 0.0);
  CHECK((D - oracle::basis_matrix(m, r)).norm() < 1e-12);

  Vec bad(2);
  bad << 0.1, NAN;
  try {
    eval_basis(m, bad);
    FAIL("expected an evaluation error");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("basis gradient evaluation")
{
  PeriodicMesh m = build_mesh(2 * M_PI, 8);
  Vec x(2);
  x << 2.5 * m.h, m.node(4);
  Mat G = eval_basis_grad(m, x).to_dense();
  CHECK(G(0, 2) == doctest::Approx(-1 / m.h));
  CHECK(G(0, 3) == doctest::Approx(1 / m.h));
  // on-node particles take the cell to the right
  CHECK(G(1, 4) == doctest::Approx(-1 / m.h));
  CHECK(G(1, 5) == doctest::Approx(1 / m.h));
  CHECK(G.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);

  // derivative of the interpolant by central differences
  std::mt19937_64 rng(2);
  Vec phi = oracle::random_matrix(8, 1, rng).col(0);
  Vec y = random_positions(3, m.length, rng);
  Vec g = eval_basis_grad(m, y).apply(phi);
  const double eps = 1e-7;
  for (int l = 0; l < 3; ++l) {
    Vec a(1), b(1);
    a << y(l) + eps;
    b << y(l) - eps;
    double fd = (eval_basis(m, a).apply(phi)(0) - eval_basis(m, b).apply(phi)(0)) / (2 * eps);
    CHECK(g(l) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("charge deposition")
{
  PeriodicMesh m = build_mesh(4 * M_PI, 16);
  ChargeConfig c = make_charge(m, 1000);
  CHECK(c.neutral(m.length));
  CHECK(c.weight == doctest::Approx(m.length / 1000));

  std::mt19937_64 rng(3);
  Vec x = random_positions(1000, m.length, rng);
  Vec rho = deposit_charge(eval_basis(m, x), c, m);
  CHECK(std::abs(rho.sum()) <= 1e-12 * rho.lpNorm<1>());

  ChargeConfig zero = c;
  zero.weight = 0;
  Vec rz = deposit_charge(eval_basis(m, x), zero, m);
  CHECK(rz.sum() == doctest::Approx(m.length));

  // one particle at node 3 carrying the whole electron charge
  ChargeConfig one = make_charge(m, 1);
  CHECK(one.weight == doctest::Approx(m.length));
  Vec x1(1);
  x1 << m.node(3);
  Vec r1 = deposit_charge(eval_basis(m, x1), one, m);
  Vec expect = Vec::Constant(16, m.h);
  expect(3) -= m.length;
  CHECK((r1 - expect).norm() < 1e-12);
}

TEST_CASE("potential solve")
{
  PeriodicMesh m = build_mesh(4 * M_PI, 32);
  PoissonOperator op(m);
  CHECK(op.solve(Vec(Vec::Zero(32))).norm() == 0.0);

  std::mt19937_64 rng(4);
  Vec v = oracle::random_matrix(32, 1, rng).col(0);
  v.array() -= v.mean();
  CHECK((op.solve(Vec(op.stiffness() * v)) - v).norm() < 1e-10);

  // circulant eigenvector
  Vec rho(32);
  for (int j = 0; j < 32; ++j) rho(j) = m.h * std::cos(2 * M_PI * m.node(j) / m.length);
  const double lam1 = (2 - 2 * std::cos(2 * M_PI * m.h / m.length)) / m.h;
  Vec phi = op.solve(rho);
  CHECK((phi - rho / lam1).norm() < 1e-12);
  CHECK(std::abs(phi.sum()) < 1e-12);
  CHECK(electric_energy(op, phi, 0.7) ==
        doctest::Approx(0.5 / 0.7 * lam1 * phi.squaredNorm()).epsilon(1e-12));

  // right-hand side with a mean is projected
  Vec shifted = rho.array() + 3.0;
  CHECK((op.solve(shifted) - phi).norm() < 1e-12);
}

TEST_CASE("electric energy gauge and field")
{
  PeriodicMesh m = build_mesh(2 * M_PI, 8);
  PoissonOperator op(m);
  CHECK(electric_energy(op, Vec::Zero(8), 1.0) == 0.0);
  CHECK(std::abs(electric_energy(op, Vec::Constant(8, 2.5), 1.0)) < 1e-12);
  std::mt19937_64 rng(5);
  Vec phi = oracle::random_matrix(8, 1, rng).col(0);
  CHECK(electric_energy(op, phi, 1.3) ==
        doctest::Approx(electric_energy(op, Vec(phi.array() + 4.0), 1.3)));

  ChargeConfig c = make_charge(m, 5);
  Vec x = random_positions(5, m.length, rng);
  DepositMatrix grad = eval_basis_grad(m, x);
  CHECK(electric_field_at_particles(grad, Vec::Zero(8), c).norm() == 0.0);
  CHECK(electric_field_at_particles(grad, Vec::Constant(8, 1.0), c).norm() < 1e-12);

  // -(field) m_p is the gradient of the electric energy in X
  Vec E = electric_field_at_particles(grad, potential_of(op, c, x), c);
  auto energy = [&](const Vec& y) { return electric_energy(op, potential_of(op, c, y), c.mp()); };
  Vec fd = oracle::fd_gradient(energy, x, 1e-6);
  for (int l = 0; l < 5; ++l) CHECK(-E(l) == doctest::Approx(fd(l)).epsilon(1e-6));
}

TEST_CASE("translation equivariance")
{
  PeriodicMesh m = build_mesh(4 * M_PI, 16);
  PoissonOperator op(m);
  ChargeConfig c = make_charge(m, 200);
  std::mt19937_64 rng(6);
  Vec x = random_positions(200, m.length, rng);
  Vec xs = x.array() + m.h;
  Vec r = deposit_charge(eval_basis(m, x), c, m), rs = deposit_charge(eval_basis(m, xs), c, m);
  Vec p = op.solve(r), ps = op.solve(rs);
  for (int j = 0; j < 16; ++j) {
    CHECK(rs((j + 1) % 16) == doctest::Approx(r(j)));
    CHECK(ps((j + 1) % 16) == doctest::Approx(p(j)));
  }
}

TEST_CASE("potential agrees with the dense reference")
{
  PeriodicMesh m = build_mesh(4 * M_PI, 16);
  PoissonOperator op(m);
  ChargeConfig c = make_charge(m, 300);
  std::mt19937_64 rng(7);
  Vec x = random_positions(300, m.length, rng);
  CHECK((potential_of(op, c, x) - oracle::potential(m, c, x)).norm() < 1e-10);
}
