#ifndef ENTRYDYN_PROBABILITY_HPP
#define ENTRYDYN_PROBABILITY_HPP

#include <string>
#include <variant>

namespace entrydyn {

/// p(q) = 1 / (1 + exp(-(q - center) / scale)); defined on the whole line.
struct Logistic {
  double scale = 1.0;
  double center = 0.0;
};

/// p(q) = q / (q + baseline), the two-propensity ratio form with a fixed
/// stay-out propensity. Defined for q >= 0 only.
struct ErevRothRatio {
  double baseline = 1.0;
};

/// Entry-probability function mapping a propensity to a probability of entering.
class ProbabilityModel {
 public:
  using Variant = std::variant<Logistic, ErevRothRatio>;

  ProbabilityModel() : ProbabilityModel(Logistic{}) {}
  ProbabilityModel(Logistic l);       // NOLINT(google-explicit-constructor)
  ProbabilityModel(ErevRothRatio e);  // NOLINT(google-explicit-constructor)

  const Variant& variant() const { return variant_; }
  bool is_logistic() const { return std::holds_alternative<Logistic>(variant_); }
  const Logistic& logistic() const;

  bool in_domain(double q) const;

  /// p(q). Throws DomainError outside the domain.
  double operator()(double q) const;
  /// p'(q). Throws DomainError outside the domain.
  double derivative(double q) const;

  std::string describe() const;

 private:
  Variant variant_;
};

inline double entry_probability(const ProbabilityModel& model, double q) { return model(q); }
inline double entry_probability_derivative(const ProbabilityModel& model, double q) {
  return model.derivative(q);
}

/// Propensity at which the model's probability equals `p` (0 < p < 1).
double propensity_for_probability(const ProbabilityModel& model, double p);

}  // namespace entrydyn

#endif  // ENTRYDYN_PROBABILITY_HPP
