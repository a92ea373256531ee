#include <doctest.h>

#include <cmath>
#include <random>

#include "entrydyn/errors.hpp"
#include "entrydyn/game.hpp"
#include "entrydyn/probability.hpp"

using namespace entrydyn;

TEST_SUITE("core") {

TEST_CASE("entry probability examples") {
  const ProbabilityModel logistic{Logistic{1.0, 0.0}};
  const ProbabilityModel ratio{ErevRothRatio{1.0}};
  CHECK(entry_probability(logistic, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(entry_probability(ratio, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(entry_probability(logistic, 20.0) - 1.0) < 1e-8);
  CHECK_THROWS_AS(entry_probability(ratio, -0.1), DomainError);
  CHECK(entry_probability(logistic, -800.0) >= 0.0);
  CHECK(entry_probability(logistic, 800.0) <= 1.0);
}

TEST_CASE("probability model rejects bad parameters") {
  CHECK_THROWS_AS(ProbabilityModel(Logistic{0.0, 0.0}), ParameterError);
  CHECK_THROWS_AS(ProbabilityModel(ErevRothRatio{-1.0}), ParameterError);
}

TEST_CASE("entry probability is strictly increasing on a dense grid") {
  const ProbabilityModel logistic{Logistic{1.3, 0.4}};
  const ProbabilityModel ratio{ErevRothRatio{2.0}};
  double prev_l = -1.0, prev_r = -1.0;
  for (int i = 0; i <= 4000; ++i) {
    const double q = -20.0 + 0.01 * i;
    const double pl = logistic(q);
    CHECK(pl > prev_l);
    prev_l = pl;
    if (q >= 0.0) {
      const double pr = ratio(q);
      CHECK(pr > prev_r);
      CHECK(pr < 1.0);
      prev_r = pr;
    }
  }
}

TEST_CASE("logistic derivative identity p' = p(1-p)/s") {
  for (const double s : {0.5, 1.0, 2.5}) {
    const ProbabilityModel m{Logistic{s, 0.3}};
    for (int i = 0; i <= 400; ++i) {
      const double q = -10.0 + 0.05 * i;
      const double p = m(q);
      CHECK(std::abs(m.derivative(q) - p * (1.0 - p) / s) <= 1e-12);
    }
  }
}

TEST_CASE("logistic derivative agrees with a central difference") {
  const ProbabilityModel m{Logistic{0.7, -0.2}};
  const double step = 1e-5;
  for (double q = -4.0; q <= 4.0; q += 0.25) {
    const double fd = (m(q + step) - m(q - step)) / (2.0 * step);
    CHECK(m.derivative(q) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("propensity_for_probability inverts the model") {
  const ProbabilityModel logistic{Logistic{1.0, 0.0}};
  const ProbabilityModel ratio{ErevRothRatio{1.5}};
  for (const double p : {0.05, 0.2, 0.5, 0.9}) {
    CHECK(logistic(propensity_for_probability(logistic, p)) == doctest::Approx(p).epsilon(1e-13));
    CHECK(ratio(propensity_for_probability(ratio, p)) == doctest::Approx(p).epsilon(1e-13));
  }
}

TEST_CASE("game parameter validation") {
  CHECK_THROWS_AS(GameParams(10, 10, 0.01, 100, LearningRule::BasicReinforcement), ParameterError);
  CHECK_THROWS_AS(GameParams(10, 0, 0.01, 100, LearningRule::BasicReinforcement), ParameterError);
  CHECK_THROWS_AS(GameParams(10, 5, 0.0, 100, LearningRule::BasicReinforcement), ParameterError);
  CHECK_THROWS_AS(GameParams(10, 5, 0.01, 0, LearningRule::BasicReinforcement), ParameterError);
  CHECK_THROWS_AS(GameParams(10, 5, 0.01, 100, LearningRule::BasicReinforcement, 0.5),
                  ParameterError);
  const GameParams g(1000, 500, 0.01, 100, LearningRule::BasicReinforcement);
  CHECK(g.kappa() == 0.5);
  CHECK(g.tau() == doctest::Approx(0.01));
  CHECK(g.r() == doctest::Approx(1000.0));
}

TEST_CASE("payoff examples") {
  const GameParams g(20, 10, 0.01, 100, LearningRule::BasicReinforcement);
  for (int m = 0; m <= 20; ++m) CHECK(payoff(false, m, g) == 0.0);
  CHECK(payoff(true, 10, g) == 0.0);
  CHECK(payoff(true, 12, g) == doctest::Approx(-0.02).epsilon(1e-14));
  CHECK_THROWS_AS(payoff(true, 21, g), ParameterError);
  CHECK_THROWS_AS(payoff(true, -1, g), ParameterError);
}

TEST_CASE("update_propensity examples") {
  const GameParams basic(20, 10, 0.01, 100, LearningRule::BasicReinforcement);
  const GameParams fict = basic.with_rule(LearningRule::FictitiousStochastic);
  CHECK(update_propensity(0.5, true, 12, basic) == doctest::Approx(0.48).epsilon(1e-14));
  for (int m = 0; m <= 20; ++m) CHECK(update_propensity(0.5, false, m, basic) == 0.5);
  CHECK(update_propensity(0.5, false, 9, fict) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(update_propensity(0.5, true, 21, basic), ParameterError);
}

TEST_CASE("update stays on the propensity lattice") {
  std::mt19937_64 gen(11);
  const double h = 0.01, offset = 0.003;
  for (const auto rule : {LearningRule::BasicReinforcement, LearningRule::FictitiousStochastic}) {
    const GameParams g(50, 20, h, 100, rule);
    for (int trial = 0; trial < 500; ++trial) {
      const int k = static_cast<int>(gen() % 400) - 200;
      const double q = offset + k * h;
      const int m = static_cast<int>(gen() % 51);
      const bool entered = (gen() & 1U) != 0U;
      const double next = update_propensity(q, entered, m, g);
      const double steps = (next - offset) / h;
      CHECK(std::abs(steps - std::round(steps)) < 1e-9);
    }
  }
}

TEST_CASE("basic reinforcement increment equals the payoff") {
  const GameParams g(30, 12, 0.05, 10, LearningRule::BasicReinforcement);
  for (const bool entered : {false, true}) {
    for (int m = 0; m <= 30; ++m) {
      CHECK(update_propensity(1.0, entered, m, g) - 1.0 ==
            doctest::Approx(payoff(entered, m, g)).epsilon(1e-13));
    }
  }
}

TEST_CASE("predicted time scales") {
  const auto a = predicted_time_scales(GameParams(1000, 500, 0.01, 100, LearningRule::BasicReinforcement));
  CHECK(a.tau_al == doctest::Approx(0.001).epsilon(1e-14));
  CHECK(a.tau_s == doctest::Approx(0.2).epsilon(1e-14));
  const auto b = predicted_time_scales(GameParams(100, 50, 0.1, 10, LearningRule::FictitiousStochastic));
  CHECK(b.tau_al == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(b.tau_s == doctest::Approx(0.2).epsilon(1e-14));
  for (const double h : {0.001, 0.01, 0.5, 1.9}) {
    const auto s = predicted_time_scales(GameParams(200, 50, h, 7, LearningRule::BasicReinforcement));
    CHECK(s.tau_s / s.tau_al == doctest::Approx(2.0 / h).epsilon(1e-13));
    CHECK(s.tau_s > s.tau_al);
  }
}

TEST_CASE("learning rule names round-trip") {
  for (const auto rule : {LearningRule::BasicReinforcement, LearningRule::FictitiousStochastic}) {
    CHECK(learning_rule_from_string(to_string(rule)) == rule);
  }
  CHECK_THROWS_AS(learning_rule_from_string("sarsa"), ParameterError);
}

}  // TEST_SUITE
