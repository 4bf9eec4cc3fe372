#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace gpsl {

// Numerical breakdown that survived the usual guards (jitter ladders, clamps).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

std::string format_point(const Eigen::VectorXd& theta);

// A simulator produced a non-finite state or otherwise failed at theta.
struct SimulatorError : std::runtime_error {
  SimulatorError(const std::string& what, Eigen::VectorXd theta_in)
      : std::runtime_error(what + " at theta=" + format_point(theta_in)),
        theta(std::move(theta_in)) {}
  Eigen::VectorXd theta;
};

// Summary statistics too degenerate to form a sample covariance.
struct DegenerateSummaries : std::runtime_error {
  DegenerateSummaries(const std::string& what, Eigen::VectorXd theta_in)
      : std::runtime_error(what + " at theta=" + format_point(theta_in)),
        theta(std::move(theta_in)) {}
  Eigen::VectorXd theta;
};

}  // namespace gpsl
