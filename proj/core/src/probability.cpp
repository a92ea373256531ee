#include "entrydyn/probability.hpp"

#include <cmath>
#include <sstream>

#include "entrydyn/errors.hpp"

namespace entrydyn {

ProbabilityModel::ProbabilityModel(Logistic l) : variant_(l) {
  if (!(l.scale > 0.0) || !std::isfinite(l.scale) || !std::isfinite(l.center)) {
    throw ParameterError("logistic scale must be positive and finite");
  }
}

ProbabilityModel::ProbabilityModel(ErevRothRatio e) : variant_(e) {
  if (!(e.baseline > 0.0) || !std::isfinite(e.baseline)) {
    throw ParameterError("ratio baseline must be positive and finite");
  }
}

const Logistic& ProbabilityModel::logistic() const {
  if (const auto* l = std::get_if<Logistic>(&variant_)) return *l;
  throw ParameterError("probability model is not logistic");
}

bool ProbabilityModel::in_domain(double q) const {
  if (std::holds_alternative<Logistic>(variant_)) return !std::isnan(q);
  return q >= 0.0;
}

namespace {

[[noreturn]] void domain_failure(const ProbabilityModel& model, double q) {
  std::ostringstream os;
  os << "propensity " << q << " outside the domain of " << model.describe();
  throw DomainError(os.str());
}

// Evaluated on the branch that does not overflow.
double logistic_value(const Logistic& l, double q) {
  const double z = (q - l.center) / l.scale;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double ProbabilityModel::operator()(double q) const {
  if (!in_domain(q)) domain_failure(*this, q);
  if (const auto* l = std::get_if<Logistic>(&variant_)) return logistic_value(*l, q);
  const auto& e = std::get<ErevRothRatio>(variant_);
  return q / (q + e.baseline);
}

double ProbabilityModel::derivative(double q) const {
  if (!in_domain(q)) domain_failure(*this, q);
  if (const auto* l = std::get_if<Logistic>(&variant_)) {
    const double p = logistic_value(*l, q);
    return p * (1.0 - p) / l->scale;
  }
  const auto& e = std::get<ErevRothRatio>(variant_);
  return e.baseline / ((q + e.baseline) * (q + e.baseline));
}

std::string ProbabilityModel::describe() const {
  std::ostringstream os;
  if (const auto* l = std::get_if<Logistic>(&variant_)) {
    os << "Logistic(scale=" << l->scale << ", center=" << l->center << ")";
  } else {
    os << "ErevRothRatio(baseline=" << std::get<ErevRothRatio>(variant_).baseline << ")";
  }
  return os.str();
}

double propensity_for_probability(const ProbabilityModel& model, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("target probability must lie in (0, 1)");
  if (const auto* l = std::get_if<Logistic>(&model.variant())) {
    return l->center + l->scale * std::log(p / (1.0 - p));
  }
  return std::get<ErevRothRatio>(model.variant()).baseline * p / (1.0 - p);
}

}  // namespace entrydyn
