#include "entrydyn/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "entrydyn/errors.hpp"

namespace entrydyn::oracle {

namespace {

void check_size(const abm::PopulationState& state, const GameParams& params) {
  if (state.size() > kMaxAgents) {
    std::ostringstream os;
    os << "exhaustive enumeration is capped at N=" << kMaxAgents << " agents (got N="
       << state.size() << ")";
    throw ParameterError(os.str());
  }
  if (state.size() != static_cast<std::size_t>(params.n_agents())) {
    throw ParameterError("population size does not match n_agents");
  }
}

}  // namespace

RoundLaw enumerate_round(const abm::PopulationState& state, const GameParams& params,
                         const ProbabilityModel& model) {
  check_size(state, params);
  const auto q = state.propensities();
  const std::size_t n = q.size();
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = model(q[i]);

  RoundLaw law;
  law.entrant_count.assign(n + 1, 0.0);
  law.expected_propensity.assign(n, 0.0);
  std::vector<double> next(n);
  bool moments_defined = true;
  const std::uint32_t patterns = 1U << n;
  for (std::uint32_t mask = 0; mask < patterns; ++mask) {
    double weight = 1.0;
    std::int64_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool in = (mask >> i) & 1U;
      weight *= in ? p[i] : 1.0 - p[i];
      m += in ? 1 : 0;
    }
    if (weight == 0.0) continue;
    law.entrant_count[static_cast<std::size_t>(m)] += weight;
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = update_propensity(q[i], (mask >> i) & 1U, m, params);
      law.expected_propensity[i] += weight * next[i];
      if (!model.in_domain(next[i])) {
        moments_defined = false;
        continue;
      }
      const double pn = model(next[i]);
      a += pn;
      b += pn * (1.0 - pn);
    }
    law.expected_a += weight * a / static_cast<double>(n);
    law.expected_b += weight * b / static_cast<double>(n);
  }
  if (!moments_defined) {
    law.expected_a = std::numeric_limits<double>::quiet_NaN();
    law.expected_b = std::numeric_limits<double>::quiet_NaN();
  }
  return law;
}

std::vector<double> poisson_binomial(std::span<const double> probabilities) {
  std::vector<double> law{1.0};
  for (const double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("probabilities must lie in [0, 1]");
    std::vector<double> next(law.size() + 1, 0.0);
    for (std::size_t k = 0; k < law.size(); ++k) {
      next[k] += law[k] * (1.0 - p);
      next[k + 1] += law[k] * p;
    }
    law = std::move(next);
  }
  return law;
}

DriftCheck expected_drift_check(const abm::PopulationState& state, const GameParams& params,
                                const ProbabilityModel& model) {
  const auto law = enumerate_round(state, params, model);
  const auto q = state.propensities();
  const std::size_t n = q.size();
  std::vector<double> p(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = model(q[i]);
    total += p[i];
  }
  const double h = params.payoff_scale();
  const auto c = static_cast<double>(params.capacity());

  DriftCheck out;
  out.enumerated.resize(n);
  out.predicted.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.enumerated[i] = law.expected_propensity[i] - q[i];
    if (params.rule() == LearningRule::BasicReinforcement) {
      out.predicted[i] = h * p[i] * (c - (total - p[i]) - 1.0);
    } else {
      out.predicted[i] = h * (c - total) - h * (1.0 - p[i]);
    }
    out.max_abs_difference =
        std::max(out.max_abs_difference, std::abs(out.enumerated[i] - out.predicted[i]));
  }
  return out;
}

}  // namespace entrydyn::oracle
