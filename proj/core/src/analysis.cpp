#include "entrydyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "entrydyn/errors.hpp"

namespace entrydyn::analysis {

DecayFit fit_exponential_decay(std::span<const double> t, std::span<const double> x, double x_inf,
                               TimeWindow window) {
  if (t.size() != x.size()) throw ParameterError("time and value arrays differ in length");
  if (!(window.t_lo < window.t_hi)) throw ParameterError("fit window needs t_lo < t_hi");

  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.t_lo || t[i] > window.t_hi) continue;
    const double gap = std::abs(x[i] - x_inf);
    if (!(gap > 0.0)) {
      std::ostringstream os;
      os << "non-positive gap |x - x_inf| at t=" << t[i]
         << "; the fit window extends past convergence";
      throw FitError(FitError::Kind::NonPositiveGap, os.str());
    }
    ts.push_back(t[i]);
    ys.push_back(std::log(gap));
  }
  if (ts.size() < 5) {
    std::ostringstream os;
    os << "only " << ts.size() << " points in window [" << window.t_lo << ", " << window.t_hi
       << "], need at least 5";
    throw FitError(FitError::Kind::InsufficientPoints, os.str());
  }

  const auto n = static_cast<double>(ts.size());
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    tm += ts[i];
    ym += ys[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - tm) * (ts[i] - tm);
    sty += (ts[i] - tm) * (ys[i] - ym);
    syy += (ys[i] - ym) * (ys[i] - ym);
  }
  const double slope = sty / stt;
  const double intercept = ym - slope * tm;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double e = ys[i] - (intercept + slope * ts[i]);
    ss_res += e * e;
  }

  DecayFit fit;
  fit.rate = -slope;
  fit.log_intercept = intercept;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.window = window;
  fit.points = ts.size();
  if (!(fit.rate > 0.0)) {
    std::ostringstream os;
    os << "fitted rate " << fit.rate << " is not positive; the gap grows on the window";
    throw FitError(FitError::Kind::NonDecaying, os.str());
  }
  fit.tau_char = 1.0 / fit.rate;
  return fit;
}

TimeWindow aggregate_learning_window(const ObservableSeries& series, double kappa, double upper,
                                     double lower) {
  if (series.empty()) throw FitError(FitError::Kind::InsufficientPoints, "empty series");
  const double g0 = std::abs(series.front().a - kappa);
  if (!(g0 > 0.0)) {
    throw FitError(FitError::Kind::NonPositiveGap, "a(0) already equals kappa; nothing to fit");
  }
  std::optional<double> t_lo;
  for (const auto& rec : series.records()) {
    const double g = std::abs(rec.a - kappa);
    if (!t_lo && g <= upper * g0) t_lo = rec.t;
    if (t_lo && g <= lower * g0) return {*t_lo, rec.t};
  }
  std::ostringstream os;
  os << "|a - kappa| never falls to " << lower << " of its initial value " << g0
     << "; extend t_end";
  throw FitError(FitError::Kind::InsufficientPoints, os.str());
}

RateComparison aggregate_learning_fit(const ObservableSeries& series, const GameParams& params,
                                      double c_p) {
  if (!(c_p > 0.0)) throw ParameterError("learning prefactor c_p must be positive");
  const double kappa = params.kappa();
  const auto window = aggregate_learning_window(series, kappa);
  const auto t = series.times();
  const auto a = series.field_a();
  return {fit_exponential_decay(t, a, kappa, window), c_p * params.r()};
}

RateComparison sorting_fit(const ObservableSeries& series, const GameParams& params,
                           double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (series.empty()) throw FitError(FitError::Kind::InsufficientPoints, "empty series");
  const double kappa = params.kappa();
  const double g0 = std::abs(series.front().a - kappa);
  std::optional<double> t_open;
  for (const auto& rec : series.records()) {
    if (g0 == 0.0 || std::abs(rec.a - kappa) < epsilon * g0) {
      t_open = rec.t;
      break;
    }
  }
  const auto scales = predicted_time_scales(params);
  if (!t_open || !(*t_open < series.back().t)) {
    std::ostringstream os;
    os << "sorting window never opens: |a - kappa| stays above " << epsilon
       << " of its initial value up to t=" << series.back().t
       << "; run to t_end >= 3 * tau_s = " << 3.0 * scales.tau_s;
    throw FitError(FitError::Kind::WindowNeverOpens, os.str());
  }
  const auto t = series.times();
  const auto b = series.field_b();
  const double predicted = params.r() * params.payoff_scale() / 2.0;
  return {fit_exponential_decay(t, b, 0.0, {*t_open, series.back().t}), predicted};
}

double moment_ode_a(double t, double a0, double kappa, double r, double c_p) {
  if (!(c_p > 0.0) || !(r > 0.0)) throw ParameterError("moment ODE needs c_p > 0 and r > 0");
  return kappa + (a0 - kappa) * std::exp(-c_p * r * t);
}

namespace {

double field_value(const ObservableRecord& rec, Field field) {
  return field == Field::A ? rec.a : rec.b;
}

// Linear interpolation; t must lie inside the series' time range.
double interpolate(const ObservableSeries& s, double t, Field field) {
  const auto& recs = s.records();
  auto it = std::lower_bound(recs.begin(), recs.end(), t,
                             [](const ObservableRecord& r, double x) { return r.t < x; });
  if (it == recs.end()) return field_value(recs.back(), field);
  if (it->t == t || it == recs.begin()) return field_value(*it, field);
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  return (1.0 - w) * field_value(lo, field) + w * field_value(hi, field);
}

std::vector<double> grid_in(const ObservableSeries& s, double lo, double hi) {
  std::vector<double> out;
  for (const auto& r : s.records()) {
    if (r.t >= lo && r.t <= hi) out.push_back(r.t);
  }
  return out;
}

}  // namespace

SeriesComparison compare_series(const ObservableSeries& s1, const ObservableSeries& s2, Field field,
                                std::optional<TimeWindow> window) {
  if (s1.empty() || s2.empty()) throw ParameterError("cannot compare an empty series");
  double lo = std::max(s1.front().t, s2.front().t);
  double hi = std::min(s1.back().t, s2.back().t);
  if (window) {
    lo = std::max(lo, window->t_lo);
    hi = std::min(hi, window->t_hi);
  }
  if (lo > hi) throw ParameterError("series have no overlapping time range");

  const auto g1 = grid_in(s1, lo, hi);
  const auto g2 = grid_in(s2, lo, hi);
  // Coarser grid wins; ties are broken by grid content so the result does not
  // depend on argument order.
  const bool use_first = g1.size() != g2.size() ? g1.size() < g2.size() : !(g2 < g1);
  const auto& grid = use_first ? g1 : g2;
  if (grid.empty()) throw ParameterError("series have no overlapping samples");

  SeriesComparison out;
  double sq = 0.0;
  for (const double t : grid) {
    const double d = std::abs(interpolate(s1, t, field) - interpolate(s2, t, field));
    sq += d * d;
    if (d > out.sup_norm) {
      out.sup_norm = d;
      out.t_at_max = t;
    }
  }
  out.points = grid.size();
  out.rmse = std::sqrt(sq / static_cast<double>(grid.size()));
  if (out.sup_norm == 0.0) out.t_at_max = grid.front();
  return out;
}

}  // namespace entrydyn::analysis
