#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eigcollide {

/// Invalid configuration or model description. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Eigensolver non-convergence, failed initialization and similar. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Greedy matching kept failing after the refinement budget was spent.
class TrackingError : public NumericalError {
 public:
  TrackingError(const std::string& what, double s, double t, std::vector<int> contested)
      : NumericalError(what), s_(s), t_(t), contested_(std::move(contested)) {}

  double s() const noexcept { return s_; }
  double t() const noexcept { return t_; }
  const std::vector<int>& contested() const noexcept { return contested_; }

 private:
  double s_;
  double t_;
  std::vector<int> contested_;
};

/// File system failures. Exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eigcollide
