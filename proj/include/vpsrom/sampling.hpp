#pragma once

#include <cstdint>
#include <string>

#include "vpsrom/fem_poisson.hpp"
#include "vpsrom/types.hpp"

namespace vpsrom {

enum class BenchmarkKind { weak_landau, nonlinear_landau, two_stream };

std::string to_string(BenchmarkKind k);
BenchmarkKind benchmark_from_string(const std::string& s);

// Parameter box Gamma in (alpha, sigma).
struct ParamBox {
  double alpha_lo = 0, alpha_hi = 0;
  double sigma_lo = 0, sigma_hi = 0;

  bool contains(double alpha, double sigma, double tol = 1e-12) const;
};

struct BenchmarkSpec {
  BenchmarkKind kind = BenchmarkKind::weak_landau;
  double k = 0.5;
  ParamBox gamma;
  double v0 = 0.0;  // two_stream only

  int N = 50000;
  int Nx = 32;
  double dt = 0.0025;
  double t_final = 20;
  int p = 300;
  int n = 4;
  int d = 32;
  int p_star = 8;
  int T = 3;
  int k_deim = 3;
  int n_update = 12;

  double domain_length() const;
  void validate() const;
};

BenchmarkSpec benchmark_defaults(BenchmarkKind kind);

// count x dims in [0,1): column 0 is l/count, column 1 the base-2 radical inverse
Mat hammersley(int count, int dims);
double radical_inverse2(std::uint64_t l);

// Root of (x + (alpha/k) sin(kx)) / length = u on [0, length].
double inverse_cdf_position(double u, double alpha, double k, double domain_length);
double cdf_position(double x, double alpha, double k, double domain_length);

double inverse_cdf_velocity(double u, BenchmarkKind kind, double sigma, double v0 = 0.0);
double cdf_velocity(double v, BenchmarkKind kind, double sigma, double v0 = 0.0);

double erfinv(double y);

struct ParticleEnsemble {
  Mat X, V;  // N x p, column i belongs to parameter i
  double t = 0;
  ChargeConfig charge;
};

// params is p x 2 with rows (alpha, sigma)
ParticleEnsemble build_initial_ensemble(const BenchmarkSpec& spec, const Mat& params);

// Same laws driven by pseudorandom uniforms instead of the quiet start. Only
// used as a baseline for loading-noise comparisons.
ParticleEnsemble build_random_ensemble(const BenchmarkSpec& spec, const Mat& params,
                                       std::uint64_t seed);

Mat sample_parameters(const ParamBox& gamma, int p);

}  // namespace vpsrom
