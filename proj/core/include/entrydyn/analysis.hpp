#ifndef ENTRYDYN_ANALYSIS_HPP
#define ENTRYDYN_ANALYSIS_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "entrydyn/game.hpp"
#include "entrydyn/series.hpp"

namespace entrydyn::analysis {

class FitError : public std::runtime_error {
 public:
  enum class Kind { InsufficientPoints, NonPositiveGap, NonDecaying, WindowNeverOpens };
  FitError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct TimeWindow {
  double t_lo;
  double t_hi;
};

struct DecayFit {
  double rate = 0.0;       // lambda
  double tau_char = 0.0;   // 1 / lambda
  double log_intercept = 0.0;
  double r_squared = 0.0;
  TimeWindow window{0.0, 0.0};
  std::size_t points = 0;
};

/// Least-squares line through (t, ln|x - x_inf|) over records with t in the window.
DecayFit fit_exponential_decay(std::span<const double> t, std::span<const double> x, double x_inf,
                               TimeWindow window);

struct RateComparison {
  DecayFit fit;
  double predicted_rate = 0.0;
  double ratio() const { return fit.rate / predicted_rate; }
  bool within_factor(double factor) const {
    return ratio() <= factor && ratio() >= 1.0 / factor;
  }
};

/// Window on which |a - kappa| falls from 80% to 20% of its initial value.
TimeWindow aggregate_learning_window(const ObservableSeries& series, double kappa,
                                     double upper = 0.8, double lower = 0.2);

/// Fits |a(t) - kappa|; predicted rate is c_p * r.
RateComparison aggregate_learning_fit(const ObservableSeries& series, const GameParams& params,
                                      double c_p);

/// Fits b(t) against 0 from the first time |a - kappa| < epsilon |a(0) - kappa|;
/// predicted rate is r h / 2.
RateComparison sorting_fit(const ObservableSeries& series, const GameParams& params,
                           double epsilon = 0.05);

/// kappa + (a0 - kappa) exp(-c_p r t).
double moment_ode_a(double t, double a0, double kappa, double r, double c_p);

enum class Field { A, B };

struct SeriesComparison {
  double sup_norm = 0.0;
  double rmse = 0.0;
  double t_at_max = 0.0;
  std::size_t points = 0;
};

/// Sup-norm and RMSE of the field difference, evaluated on the coarser of the
/// two time grids inside the overlap (optionally clipped to `window`), the
/// other series linearly interpolated.
SeriesComparison compare_series(const ObservableSeries& s1, const ObservableSeries& s2, Field field,
                                std::optional<TimeWindow> window = std::nullopt);

}  // namespace entrydyn::analysis

#endif  // ENTRYDYN_ANALYSIS_HPP
