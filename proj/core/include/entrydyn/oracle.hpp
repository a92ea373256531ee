#ifndef ENTRYDYN_ORACLE_HPP
#define ENTRYDYN_ORACLE_HPP

#include <span>
#include <vector>

#include "entrydyn/abm.hpp"
#include "entrydyn/game.hpp"
#include "entrydyn/probability.hpp"

namespace entrydyn::oracle {

inline constexpr std::size_t kMaxAgents = 12;

/// Exact one-round law of a small population.
struct RoundLaw {
  std::vector<double> entrant_count;        // P(m = k), k = 0..N
  std::vector<double> expected_propensity;  // E[q_i'] per agent
  // E[a], E[b] after the round; NaN when some outcome leaves the model's domain.
  double expected_a = 0.0;
  double expected_b = 0.0;
};

/// Enumerates all 2^N entry patterns. Throws ParameterError for N > 12.
RoundLaw enumerate_round(const abm::PopulationState& state, const GameParams& params,
                         const ProbabilityModel& model);

/// Law of a sum of independent Bernoulli(p_i) by the convolution recurrence.
std::vector<double> poisson_binomial(std::span<const double> probabilities);

struct DriftCheck {
  std::vector<double> enumerated;  // E[dq_i] from enumerate_round
  std::vector<double> predicted;   // closed conditional form
  double max_abs_difference = 0.0;
};

/// Basic: h p_i (c - sum_{j != i} p_j - 1).
/// Fictitious: h (c - sum_j p_j) - h (1 - p_i).
DriftCheck expected_drift_check(const abm::PopulationState& state, const GameParams& params,
                                const ProbabilityModel& model);

}  // namespace entrydyn::oracle

#endif  // ENTRYDYN_ORACLE_HPP
