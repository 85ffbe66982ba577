#pragma once

// Brute-force references. Everything here forms the full matrices the
// library avoids, so it is only usable on small instances.

#include <functional>
#include <random>

#include "vpsrom/fem_poisson.hpp"
#include "vpsrom/hyperreduction.hpp"
#include "vpsrom/types.hpp"

namespace oracle {

using vpsrom::CMat;
using vpsrom::CVec;
using vpsrom::Mat;
using vpsrom::Vec;

Mat dense_J(int m);

// random ortho-symplectic 2N x n basis and a random n x p coefficient matrix
Mat random_orthosymplectic(int N, int n, std::mt19937_64& rng);
Mat random_matrix(int rows, int cols, std::mt19937_64& rng);

// (I - M/2)^{-1} (I + M/2) U with M = W U^T - U W^T, W = (I - U U^T/2) xi
Mat cayley(const Mat& U, const Mat& xi);

// (I - U U^T)(J G Z^T - G Z^T J_n^T) S^{-1}, S = Z Z^T + J_n^T Z Z^T J_n
Mat basis_velocity(const Mat& U, const Mat& Z, const Mat& G);

// Upsilon = (2X - (W U^T - U W^T) X)(U^T R + I)^{-1},
// Y = -U (R^T U + I)^{-1} (R + U)^T Upsilon + Upsilon - U Upsilon^T U
Mat tangent_velocity(const Mat& xi, const Mat& U, const Mat& Xr);

// Stiffness by assembling element matrices, hat functions by direct
// evaluation, and a pseudo-inverse Poisson solve.
Mat stiffness(const vpsrom::PeriodicMesh& mesh);
double hat(const vpsrom::PeriodicMesh& mesh, int j, double x);
double hat_slope(const vpsrom::PeriodicMesh& mesh, int j, double x);
Mat basis_matrix(const vpsrom::PeriodicMesh& mesh, const Vec& X);
Vec potential(const vpsrom::PeriodicMesh& mesh, const vpsrom::ChargeConfig& c, const Vec& X);
double hamiltonian(const vpsrom::PeriodicMesh& mesh, const vpsrom::ChargeConfig& c, const Vec& X,
                   const Vec& V);

// z -> H(U z) for one parameter
double reduced_hamiltonian(const vpsrom::PeriodicMesh& mesh, const vpsrom::ChargeConfig& c,
                           const Mat& U, const Vec& z);

// 1/2 |U_V z|^2 + m_p^{-1} M_q^T Psi (P^T Psi)^{-1} P^T Lambda0(U_X z) phi, the
// scalar whose gradient the hyper-reduced field is
double hyperreduced_potential(const vpsrom::PeriodicMesh& mesh, const vpsrom::ChargeConfig& c,
                              const Mat& U, const Vec& z, const Vec& phi,
                              const vpsrom::DeimModel& deim);

// central differences of f at z
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& z, double h);

// Trajectories y_{k+1} = A y_k of a rank-r map with prescribed nonzero
// eigenvalues, stacked as (Y, Y') windows of T pairs for each of `series`
// starting vectors inside the range of A.
struct LinearSystem {
  CMat A;             // nx x nx
  CVec eigenvalues;   // the r nonzero eigenvalues
  std::vector<Vec> y0;
  Mat Y, Yp;
  // y_{k} of series s, k = 0 .. (any)
  Vec state(int s, int k) const;
};

LinearSystem synthetic_linear_system(int nx, const CVec& eigenvalues, int series, int T,
                                     std::mt19937_64& rng);

// Smallest |a - b| over all pairings of two equal-size eigenvalue lists.
double spectrum_distance(const CVec& a, const CVec& b);

}  // namespace oracle
