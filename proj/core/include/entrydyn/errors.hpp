#ifndef ENTRYDYN_ERRORS_HPP
#define ENTRYDYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace entrydyn {

// Invalid parameters or inputs at construction time.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Propensity outside the probability model's domain (e.g. q < 0 for the ratio form).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Non-finite values or a violated time-step bound inside a solver.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace entrydyn

#endif  // ENTRYDYN_ERRORS_HPP
