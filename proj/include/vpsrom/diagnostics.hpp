#pragma once

#include <functional>
#include <vector>

#include "vpsrom/types.hpp"

namespace vpsrom {

struct StateErrors {
  double X = 0, V = 0;
  double total = 0;        // both blocks together
  bool undefined = false;  // zero reference norm
};

StateErrors relative_errors(const Mat& SX, const Mat& SV, const Mat& Xr, const Mat& Vr);

// Relative residuals of projecting [S_X; S_V] onto the time-local complex-SVD
// basis of size n.
StateErrors target_projection_errors(const Mat& SX, const Mat& SV, int n);

int numerical_rank(const Mat& S, double tol);

struct HamiltonianSplit {
  double dH = 0;     // ||H(U_t Z_t) - H(U_{t-1} Z_{t-1})||
  double dHZ = 0;    // ||H(U_h Z_t) - H(U_h Z_{t-1})||
  double dHZdd = 0;  // ||H^dd(Z_t, t_t) - H^dd(Z_{t-1}, t_{t-1})||
};

// H(U, z, i) evaluates the full Hamiltonian of U z for parameter i; Hdd(z, i, t)
// the DMD-DEIM Hamiltonian at the frozen half-step basis.
using HamiltonianFn = std::function<double(const Mat& U, const Vec& z, int i)>;
using HddFn = std::function<double(const Vec& z, int i, double t)>;

HamiltonianSplit hamiltonian_error_decomposition(const Mat& U_prev, const Mat& U_half,
                                                 const Mat& U_next, const Mat& Z_prev,
                                                 const Mat& Z_next, double t_prev, double t_next,
                                                 const HamiltonianFn& H, const HddFn& Hdd);

// ||H_ref - H||_2 / ||H_ref||_2 over the parameters
double hamiltonian_relative_error(const Vec& H_ref, const Vec& H);

enum class RateMode { damping, growth };

struct RateFitError : std::runtime_error {
  RateFitError(const std::string& what, int peaks) : std::runtime_error(what), peaks(peaks) {}
  int peaks;
};

struct RateFit {
  double rate = 0;
  std::vector<double> peak_t, peak_logE;  // peaks used in the fit
};

// Slope of log E through the local maxima inside [t_lo, t_hi], first peak
// dropped. Peaks need a prominence of at least 1e-3 of the window maximum.
RateFit fit_energy_rate(const std::vector<double>& t, const std::vector<double>& E, RateMode mode,
                        double t_lo = -INFINITY, double t_hi = INFINITY);

}  // namespace vpsrom
