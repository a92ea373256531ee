#include <doctest.h>

#include <cmath>
#include <random>

#include "entrydyn/analysis.hpp"
#include "entrydyn/errors.hpp"

using namespace entrydyn;
using namespace entrydyn::analysis;

namespace {

ObservableSeries make_series(double t_end, int n, auto&& a_of, auto&& b_of) {
  ObservableSeries s;
  for (int i = 0; i <= n; ++i) {
    const double t = t_end * i / n;
    s.push_back({t, a_of(t), b_of(t), {}, {}, {}});
  }
  return s;
}

const GameParams kParams(1000, 500, 0.01, 100, LearningRule::BasicReinforcement);

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("exact exponential recovers its rate") {
  std::vector<double> t, x;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.02 * i);
    x.push_back(0.5 - 0.3 * std::exp(-3.0 * t.back()));
  }
  const auto fit = fit_exponential_decay(t, x, 0.5, {0.0, 2.0});
  CHECK(fit.rate == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fit.tau_char == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(fit.log_intercept == doctest::Approx(std::log(0.3)).epsilon(1e-10));
}

TEST_CASE("noiseless rate is window independent") {
  std::vector<double> t, x;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.01 * i);
    x.push_back(1.0 + 2.0 * std::exp(-1.7 * t.back()));
  }
  for (const double lo : {0.0, 0.5, 1.3, 2.9}) {
    const auto fit = fit_exponential_decay(t, x, 1.0, {lo, lo + 0.8});
    CHECK(std::abs(fit.rate - 1.7) / 1.7 <= 1e-8);
  }
}

TEST_CASE("degenerate inputs are explicit failures") {
  std::vector<double> t, flat, grow;
  for (int i = 0; i < 20; ++i) {
    t.push_back(0.1 * i);
    flat.push_back(0.5);
    grow.push_back(0.5 + 0.1 * std::exp(t.back()));
  }
  try {
    fit_exponential_decay(t, flat, 0.5, {0.0, 2.0});
    FAIL("expected a fit error");
  } catch (const FitError& e) {
    CHECK(e.kind() == FitError::Kind::NonPositiveGap);
  }
  try {
    fit_exponential_decay(t, grow, 0.5, {0.0, 2.0});
    FAIL("expected a fit error");
  } catch (const FitError& e) {
    CHECK(e.kind() == FitError::Kind::NonDecaying);
  }
  try {
    fit_exponential_decay(t, grow, 0.5, {0.0, 0.35});
    FAIL("expected a fit error");
  } catch (const FitError& e) {
    CHECK(e.kind() == FitError::Kind::InsufficientPoints);
  }
}

// Synthetic-data oracle: true rate known, noise sd 1% of the gap.
TEST_CASE("noisy exponential recovers its rate within 5 percent") {
  const double lambda = 4.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> t, x;
    for (int i = 0; i <= 300; ++i) {
      t.push_back((3.0 / lambda) * i / 300.0);
      const double gap = 0.3 * std::exp(-lambda * t.back());
      x.push_back(0.5 - gap * (1.0 + 0.01 * noise(gen)));
    }
    const auto fit = fit_exponential_decay(t, x, 0.5, {0.0, 3.0 / lambda});
    CHECK(std::abs(fit.rate - lambda) / lambda < 0.05);
  }
}

TEST_CASE("moment ODE closed form") {
  CHECK(moment_ode_a(0.0, 0.2, 0.5, 1000.0, 0.01) == 0.2);
  CHECK(moment_ode_a(1e3, 0.2, 0.5, 1000.0, 0.01) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(moment_ode_a(0.1, 0.2, 0.5, 1000.0, 0.01) ==
        doctest::Approx(0.5 - 0.3 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(moment_ode_a(0.1, 0.2, 0.5, 1000.0, 0.01) == doctest::Approx(0.38964).epsilon(1e-5));
}

TEST_CASE("aggregate learning fit is self consistent on the closed form") {
  const double c_p = 0.01;
  const auto s = make_series(
      0.5, 500, [&](double t) { return moment_ode_a(t, 0.2, 0.5, kParams.r(), c_p); },
      [](double) { return 0.1; });
  const auto rc = aggregate_learning_fit(s, kParams, c_p);
  CHECK(rc.predicted_rate == doctest::Approx(10.0));
  CHECK(rc.fit.rate == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(rc.within_factor(1.0 + 1e-9));
  CHECK(rc.fit.window.t_lo > 0.0);
  CHECK(std::abs(0.5 - moment_ode_a(rc.fit.window.t_hi, 0.2, 0.5, kParams.r(), c_p)) <= 0.2 * 0.3);
}

TEST_CASE("sorting fit on a synthetic exponential") {
  const auto s = make_series(
      2.0, 400, [](double t) { return 0.5 - 0.3 * std::exp(-50.0 * t); },
      [](double t) { return 0.25 * std::exp(-5.0 * t); });
  const auto rc = sorting_fit(s, kParams);
  CHECK(rc.fit.rate == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(rc.predicted_rate == doctest::Approx(5.0));
  CHECK(rc.fit.window.t_lo == doctest::Approx(0.06));
}

TEST_CASE("sorting window that never opens names the needed run length") {
  const auto s = make_series(
      0.001, 20, [](double t) { return 0.5 - 0.3 * std::exp(-30.0 * t); },
      [](double t) { return 0.2 * std::exp(-5.0 * t); });
  try {
    sorting_fit(s, kParams);
    FAIL("expected the window to stay closed");
  } catch (const FitError& e) {
    CHECK(e.kind() == FitError::Kind::WindowNeverOpens);
    CHECK(std::string(e.what()).find("0.6") != std::string::npos);
  }
}

TEST_CASE("fits scale with time units") {
  const double gamma = 7.5;
  auto build = [&](double scale) {
    return make_series(
        1.0 * scale, 400,
        [&](double t) { return moment_ode_a(t / scale, 0.2, 0.5, kParams.r(), 0.02); },
        [&](double t) {
          const double u = t / scale;
          return 0.2 * std::exp(-4.0 * u) + 0.01 * std::exp(-9.0 * u);
        });
  };
  const auto base = build(1.0);
  const auto scaled = build(gamma);
  const auto l1 = aggregate_learning_fit(base, kParams, 0.02);
  const auto l2 = aggregate_learning_fit(scaled, kParams, 0.02);
  CHECK(l2.fit.rate == doctest::Approx(l1.fit.rate / gamma).epsilon(1e-9));
  const auto s1 = sorting_fit(base, kParams);
  const auto s2 = sorting_fit(scaled, kParams);
  CHECK(s2.fit.rate == doctest::Approx(s1.fit.rate / gamma).epsilon(1e-9));
}

TEST_CASE("compare_series identities") {
  const auto s = make_series(1.0, 100, [](double t) { return 0.2 + 0.3 * t; },
                             [](double t) { return 0.25 - 0.1 * t; });
  const auto same = compare_series(s, s, Field::A);
  CHECK(same.sup_norm == 0.0);
  CHECK(same.rmse == 0.0);

  const auto shifted = make_series(1.0, 100, [](double t) { return 0.21 + 0.3 * t; },
                                   [](double t) { return 0.25 - 0.1 * t; });
  const auto c = compare_series(s, shifted, Field::A);
  CHECK(c.sup_norm == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(c.rmse == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(compare_series(s, shifted, Field::B).sup_norm == 0.0);

  const auto late = make_series(1.0, 10, [](double t) { return t + 5.0; }, [](double) { return 0.0; });
  ObservableSeries disjoint;
  disjoint.push_back({2.0, 0.1, 0.1, {}, {}, {}});
  disjoint.push_back({3.0, 0.1, 0.1, {}, {}, {}});
  CHECK_THROWS_AS(compare_series(late, disjoint, Field::A), ParameterError);
}

TEST_CASE("compare_series is symmetric and uses the coarser grid") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    ObservableSeries s1, s2;
    double t = 0.0;
    for (int i = 0; i < 20 + static_cast<int>(gen() % 30); ++i) {
      s1.push_back({t, u(gen), u(gen), {}, {}, {}});
      t += 0.01 + u(gen) * 0.05;
    }
    t = u(gen) * 0.1;
    for (int i = 0; i < 20 + static_cast<int>(gen() % 30); ++i) {
      s2.push_back({t, u(gen), u(gen), {}, {}, {}});
      t += 0.01 + u(gen) * 0.05;
    }
    const auto ab = compare_series(s1, s2, Field::A);
    const auto ba = compare_series(s2, s1, Field::A);
    CHECK(ab.sup_norm == ba.sup_norm);
    CHECK(ab.rmse == ba.rmse);
    CHECK(ab.t_at_max == ba.t_at_max);
  }
}

}  // TEST_SUITE
