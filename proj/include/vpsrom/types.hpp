#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace vpsrom {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using IVec = Eigen::VectorXi;
using cplx = std::complex<double>;

// invalid sizes, odd n, parameters outside the box, ...
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// non-finite positions, degenerate data handed to a fit
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// singular Cayley / tangent systems; the usual cure is a smaller dt
struct StepSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vpsrom
