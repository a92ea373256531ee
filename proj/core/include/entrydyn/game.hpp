#ifndef ENTRYDYN_GAME_HPP
#define ENTRYDYN_GAME_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace entrydyn {

enum class LearningRule {
  BasicReinforcement,    // only realized payoffs of entering move q
  FictitiousStochastic,  // q also tracks the forgone payoff of the other action
};

std::string_view to_string(LearningRule rule);
LearningRule learning_rule_from_string(std::string_view name);

/// Physical constants of the repeated market entry game.
///
/// The outside payoff v is carried for documentation of the general payoff
/// form but must be zero; all derived quantities assume v = 0.
class GameParams {
 public:
  GameParams(std::int64_t n_agents, std::int64_t capacity, double payoff_scale,
             std::int64_t rounds_per_unit, LearningRule rule, double outside_payoff = 0.0);

  std::int64_t n_agents() const { return n_agents_; }
  std::int64_t capacity() const { return capacity_; }
  double payoff_scale() const { return payoff_scale_; }
  std::int64_t rounds_per_unit() const { return rounds_per_unit_; }
  double outside_payoff() const { return outside_payoff_; }
  LearningRule rule() const { return rule_; }

  double tau() const { return 1.0 / static_cast<double>(rounds_per_unit_); }
  double kappa() const {
    return static_cast<double>(capacity_) / static_cast<double>(n_agents_);
  }
  /// r = N h M, the aggregate rate constant.
  double r() const {
    return static_cast<double>(n_agents_) * payoff_scale_ * static_cast<double>(rounds_per_unit_);
  }

  GameParams with_rule(LearningRule rule) const;

 private:
  std::int64_t n_agents_;
  std::int64_t capacity_;
  double payoff_scale_;
  std::int64_t rounds_per_unit_;
  LearningRule rule_;
  double outside_payoff_;
};

/// Payoff of one agent given its action and the total entrant count m.
double payoff(bool entered, std::int64_t m, const GameParams& params);

/// One-round propensity update. `m` counts all entrants, including this
/// agent when `entered` is true.
double update_propensity(double q, bool entered, std::int64_t m, const GameParams& params);

struct TimeScales {
  double tau_al;  // aggregate learning, 1/r
  double tau_s;   // sorting, 2/(r h)
};

/// tau_s uses the moment-decay constant 2/(r h); the cruder 1/(M N h^2)
/// order-of-magnitude statement differs from it by a factor of two.
TimeScales predicted_time_scales(const GameParams& params);

}  // namespace entrydyn

#endif  // ENTRYDYN_GAME_HPP
