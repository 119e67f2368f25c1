#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace stochq {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Input rejected by a precondition check. `field` names the offending piece of
// input when one can be identified (used by the CLI's structured errors).
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what, std::string field = {})
      : std::runtime_error(what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IntegrationError : public std::runtime_error {
public:
  IntegrationError(const std::string& what, long step)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}

  long step() const noexcept { return step_; }

private:
  long step_;
};

class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline double max_abs(const ComplexMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const RealMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace stochq
