#ifndef LRR_TYPES_HPP
#define LRR_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace lrr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using MultiIndex = Eigen::VectorXi;

// Bad input: malformed files, parameters violating a precondition.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Integer outputs (ranks, dimensions) that do not survive a threshold
// perturbation, or iterations that fail to stabilize.
struct InstabilityError : std::runtime_error {
  explicit InstabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

// A hypothesis required by the requested analysis does not hold for the
// given instance (infinite Fermi surface, spectral margin violation, ...).
struct NotApplicableError : std::runtime_error {
  explicit NotApplicableError(const std::string& msg) : std::runtime_error(msg) {}
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace lrr

#endif
