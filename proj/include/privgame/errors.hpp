#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace privgame {

// Block shapes disagree with the declared dimensions.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke an operation's precondition (wrong n_y, singular kappa, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The stacked covariance of (y, z) is not positive definite, so the
// least-mean-square gains are not unique.
class DegenerateMessageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The joint covariance of (x, w, z) fails validation.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Scenario/policy file could not be read or parsed.
class ScenarioIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace privgame
