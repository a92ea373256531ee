#include "entrydyn/game.hpp"

#include <cmath>
#include <sstream>

#include "entrydyn/errors.hpp"

namespace entrydyn {

std::string_view to_string(LearningRule rule) {
  switch (rule) {
    case LearningRule::BasicReinforcement:
      return "basic";
    case LearningRule::FictitiousStochastic:
      return "fictitious";
  }
  return "unknown";
}

LearningRule learning_rule_from_string(std::string_view name) {
  if (name == "basic" || name == "BasicReinforcement") return LearningRule::BasicReinforcement;
  if (name == "fictitious" || name == "FictitiousStochastic") {
    return LearningRule::FictitiousStochastic;
  }
  throw ParameterError("unknown learning rule '" + std::string(name) +
                       "' (expected basic or fictitious)");
}

GameParams::GameParams(std::int64_t n_agents, std::int64_t capacity, double payoff_scale,
                       std::int64_t rounds_per_unit, LearningRule rule, double outside_payoff)
    : n_agents_(n_agents),
      capacity_(capacity),
      payoff_scale_(payoff_scale),
      rounds_per_unit_(rounds_per_unit),
      rule_(rule),
      outside_payoff_(outside_payoff) {
  if (n_agents_ < 1) throw ParameterError("n_agents must be positive");
  if (capacity_ < 1 || capacity_ >= n_agents_) {
    std::ostringstream os;
    os << "capacity must satisfy 0 < c < N (got c=" << capacity_ << ", N=" << n_agents_ << ")";
    throw ParameterError(os.str());
  }
  if (!(payoff_scale_ > 0.0) || !std::isfinite(payoff_scale_)) {
    throw ParameterError("payoff_scale must be positive and finite");
  }
  if (rounds_per_unit_ < 1) throw ParameterError("rounds_per_unit must be positive");
  if (outside_payoff_ != 0.0) throw ParameterError("outside_payoff must be 0");
}

GameParams GameParams::with_rule(LearningRule rule) const {
  return GameParams(n_agents_, capacity_, payoff_scale_, rounds_per_unit_, rule, outside_payoff_);
}

namespace {

void check_count(std::int64_t m, const GameParams& params) {
  if (m < 0 || m > params.n_agents()) {
    std::ostringstream os;
    os << "entrant count " << m << " outside [0, " << params.n_agents() << "]";
    throw ParameterError(os.str());
  }
}

}  // namespace

double payoff(bool entered, std::int64_t m, const GameParams& params) {
  check_count(m, params);
  const double v = params.outside_payoff();
  if (!entered) return v;
  return v + params.payoff_scale() * static_cast<double>(params.capacity() - m);
}

double update_propensity(double q, bool entered, std::int64_t m, const GameParams& params) {
  check_count(m, params);
  const double h = params.payoff_scale();
  const auto excess = static_cast<double>(params.capacity() - m);
  switch (params.rule()) {
    case LearningRule::BasicReinforcement:
      return entered ? q + h * excess : q;
    case LearningRule::FictitiousStochastic:
      return entered ? q + h * excess : q + h * (excess - 1.0);
  }
  return q;
}

TimeScales predicted_time_scales(const GameParams& params) {
  const double r = params.r();
  return {1.0 / r, 2.0 / (r * params.payoff_scale())};
}

}  // namespace entrydyn
