#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "entrydyn/errors.hpp"
#include "entrydyn/oracle.hpp"

using namespace entrydyn;
using entrydyn::abm::PopulationState;

TEST_SUITE("oracle") {

TEST_CASE("poisson-binomial small cases") {
  const std::vector<double> p{0.5, 0.5};
  const auto law = oracle::poisson_binomial(p);
  REQUIRE(law.size() == 3);
  CHECK(law[0] == 0.25);
  CHECK(law[1] == 0.5);
  CHECK(law[2] == 0.25);
  const std::vector<double> bad{1.5};
  CHECK_THROWS_AS(oracle::poisson_binomial(bad), ParameterError);
}

TEST_CASE("saturated entrant sees no change") {
  // Agent 0 always enters, agent 1 never does: m = 1 = c every round.
  const ProbabilityModel model{Logistic{1.0, 0.0}};
  const PopulationState s({800.0, -800.0}, 0, 0.1);
  for (const auto rule : {LearningRule::BasicReinforcement, LearningRule::FictitiousStochastic}) {
    const GameParams g(2, 1, 0.1, 10, rule);
    const auto law = oracle::enumerate_round(s, g, model);
    CHECK(law.entrant_count[1] == 1.0);
    CHECK(law.expected_propensity[0] == 800.0);
    const auto drift = oracle::expected_drift_check(s, g, model);
    CHECK(drift.enumerated[0] == 0.0);
    CHECK(drift.max_abs_difference <= 1e-12);
  }
}

TEST_CASE("enumeration is capped") {
  const GameParams g(13, 5, 0.1, 10, LearningRule::BasicReinforcement);
  const PopulationState s(std::vector<double>(13, 0.0), 0, 0.1);
  try {
    oracle::enumerate_round(s, g, ProbabilityModel{Logistic{1.0, 0.0}});
    FAIL("expected the cap to trigger");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("12") != std::string::npos);
  }
}

TEST_CASE("random states satisfy the exact identities") {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> normal(0.0, 2.0);
  double worst_law = 0.0, worst_drift = 0.0, worst_mean = 0.0, worst_mass = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 11);
    const int c = 1 + static_cast<int>(gen() % static_cast<unsigned>(n - 1));
    const double h = 0.01 + 0.2 * std::generate_canonical<double, 53>(gen);
    const auto rule = (gen() & 1U) ? LearningRule::BasicReinforcement : LearningRule::FictitiousStochastic;
    const GameParams g(n, c, h, 10, rule);
    const bool ratio = trial % 4 == 3;
    const ProbabilityModel model = ratio ? ProbabilityModel{ErevRothRatio{1.0}}
                                         : ProbabilityModel{Logistic{1.0, 0.0}};
    std::vector<double> q(static_cast<std::size_t>(n));
    for (auto& x : q) x = ratio ? std::abs(normal(gen)) : normal(gen);
    const PopulationState s(q, 0, g.tau());

    const auto law = oracle::enumerate_round(s, g, model);
    std::vector<double> p(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) p[i] = model(q[i]);
    const auto pb = oracle::poisson_binomial(p);
    double mass = 0.0, mean = 0.0;
    for (std::size_t k = 0; k < pb.size(); ++k) {
      worst_law = std::max(worst_law, std::abs(pb[k] - law.entrant_count[k]));
      mass += law.entrant_count[k];
      mean += static_cast<double>(k) * law.entrant_count[k];
    }
    worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
    worst_mean = std::max(worst_mean, std::abs(mean - std::accumulate(p.begin(), p.end(), 0.0)));
    worst_drift = std::max(worst_drift, oracle::expected_drift_check(s, g, model).max_abs_difference);
  }
  CHECK(worst_law <= 1e-12);
  CHECK(worst_mass <= 1e-12);
  CHECK(worst_mean <= 1e-12);
  CHECK(worst_drift <= 1e-12);
}

TEST_CASE("moments are undefined when an outcome leaves the domain") {
  const GameParams g(3, 1, 0.5, 10, LearningRule::BasicReinforcement);
  const PopulationState s({0.1, 0.2, 0.3}, 0, g.tau());
  const auto law = oracle::enumerate_round(s, g, ProbabilityModel{ErevRothRatio{1.0}});
  CHECK(std::isnan(law.expected_a));
  CHECK(std::isnan(law.expected_b));
}

}  // TEST_SUITE
