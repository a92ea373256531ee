#include "entrydyn/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "entrydyn/errors.hpp"

namespace entrydyn::kinetic {

Variant variant_for(LearningRule rule) {
  return rule == LearningRule::BasicReinforcement ? Variant::EqA : Variant::EqB;
}

namespace {

void require_logistic(const ProbabilityModel& model) {
  if (!model.is_logistic()) {
    throw ParameterError("the continuum engine requires a logistic probability model, got " +
                         model.describe());
  }
}

// Upwind advective flux plus centred diffusive flux; boundary faces carry none.
void flux_update(std::span<double> f, const Coefficients& c, double dt, double dq,
                 std::vector<double>& flux) {
  const std::size_t k = f.size();
  flux.assign(k + 1, 0.0);
  for (std::size_t i = 1; i < k; ++i) {
    const double v = c.velocity[i];
    const double upwind = v > 0.0 ? f[i - 1] : f[i];
    flux[i] = v * upwind - c.diffusivity[i] * (f[i] - f[i - 1]) / dq;
  }
  const double ratio = dt / dq;
  for (std::size_t i = 0; i < k; ++i) {
    f[i] -= ratio * (flux[i + 1] - flux[i]);
    if (!std::isfinite(f[i])) {
      std::ostringstream os;
      os << "non-finite density in cell " << i;
      throw NumericalError(os.str());
    }
  }
}

// Probability values sampled once per grid; the grid never changes within a run.
class Stepper {
 public:
  Stepper(const GridSpec& grid, const GameParams& params, const ProbabilityModel& model,
          Variant variant)
      : grid_(grid), params_(params), variant_(variant) {
    require_logistic(model);
    grid_.validate();
    const std::size_t k = grid_.cells;
    p_center_.resize(k);
    for (std::size_t i = 0; i < k; ++i) p_center_[i] = model(grid_.center(i));
    p_face_.resize(k + 1);
    dp_face_.resize(k + 1);
    for (std::size_t i = 0; i <= k; ++i) {
      p_face_[i] = model(grid_.face(i));
      dp_face_[i] = model.derivative(grid_.face(i));
    }
  }

  Moments moments(std::span<const double> f) const {
    Moments m;
    for (std::size_t i = 0; i < f.size(); ++i) {
      m.a += p_center_[i] * f[i];
      m.b += p_center_[i] * (1.0 - p_center_[i]) * f[i];
    }
    m.a *= grid_.dq();
    m.b *= grid_.dq();
    return m;
  }

  void coefficients(const Moments& m, Coefficients& out) const {
    const double gap = params_.kappa() - m.a;
    const double r = params_.r();
    const double h = params_.payoff_scale();
    const auto n = static_cast<double>(params_.n_agents());
    out.drift_scale = r * gap;
    out.diffusion_scale = 0.5 * (r * n * h * gap * gap + r * h * m.b);
    const std::size_t faces = grid_.cells + 1;
    out.velocity.resize(faces);
    out.diffusivity.resize(faces);
    for (std::size_t i = 0; i < faces; ++i) {
      if (variant_ == Variant::EqA) {
        out.velocity[i] = out.drift_scale * p_face_[i] - out.diffusion_scale * dp_face_[i];
        out.diffusivity[i] = out.diffusion_scale * p_face_[i];
      } else {
        out.velocity[i] = out.drift_scale;
        out.diffusivity[i] = out.diffusion_scale;
      }
    }
  }

  // Advances f in place. Coefficients must come from the same f.
  void advance(std::span<double> f, const Coefficients& c, double dt) {
    flux_update(f, c, dt, grid_.dq(), flux_);
  }

  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  GameParams params_;
  Variant variant_;
  std::vector<double> p_center_;
  std::vector<double> p_face_;
  std::vector<double> dp_face_;
  std::vector<double> flux_;
};

}  // namespace

Moments moments(const DensityGrid& f, const ProbabilityModel& model) {
  require_logistic(model);
  Moments m;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double p = model(f.center(k));
    m.a += p * f[k];
    m.b += p * (1.0 - p) * f[k];
  }
  m.a *= f.dq();
  m.b *= f.dq();
  return m;
}

double learning_prefactor(const DensityGrid& f, const ProbabilityModel& model) {
  require_logistic(model);
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    s += model.derivative(f.center(k)) * model(f.center(k)) * f[k];
  }
  return s * f.dq();
}

Coefficients coefficients(double a, double b, const GameParams& params,
                          const ProbabilityModel& model, const GridSpec& grid, Variant variant) {
  if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0)) {
    throw ParameterError("coefficients need 0 <= a <= 1 and b >= 0");
  }
  Stepper stepper(grid, params, model, variant);
  Coefficients out;
  stepper.coefficients({a, b}, out);
  return out;
}

double stable_dt(const GridSpec& grid, const Coefficients& coeffs, double cfl_safety, double cap) {
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
    throw ParameterError("cfl_safety must lie in (0, 1]");
  }
  double vmax = 0.0;
  for (const double v : coeffs.velocity) vmax = std::max(vmax, std::abs(v));
  double mumax = 0.0;
  for (const double mu : coeffs.diffusivity) mumax = std::max(mumax, mu);
  const double dq = grid.dq();
  double dt = std::numeric_limits<double>::infinity();
  if (vmax > 0.0) dt = std::min(dt, dq / vmax);
  if (mumax > 0.0) dt = std::min(dt, dq * dq / (2.0 * mumax));
  return std::min(cap, cfl_safety * dt);
}

DensityGrid advance(const DensityGrid& f, const Coefficients& coeffs, double dt) {
  const std::size_t faces = f.size() + 1;
  if (coeffs.velocity.size() != faces || coeffs.diffusivity.size() != faces) {
    throw ParameterError("coefficient arrays must have one entry per face");
  }
  DensityGrid out = f;
  std::vector<double> flux;
  flux_update(out.values(), coeffs, dt, f.dq(), flux);
  return out;
}

DensityGrid step(const DensityGrid& f, double dt, const GameParams& params,
                 const ProbabilityModel& model, Variant variant) {
  Stepper stepper(f.spec(), params, model, variant);
  Coefficients c;
  stepper.coefficients(stepper.moments(f.values()), c);
  const double limit = stable_dt(f.spec(), c, 1.0, std::numeric_limits<double>::infinity());
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << dt << " exceeds the stability bound " << limit;
    throw NumericalError(os.str());
  }
  DensityGrid out = f;
  stepper.advance(out.values(), c, dt);
  return out;
}

SolveResult solve(const DensityGrid& f0, const GameParams& params, const ProbabilityModel& model,
                  const PdeRunParams& run) {
  if (!(run.t_end > 0.0)) throw ParameterError("t_end must be positive");
  if (!(run.output_interval > 0.0)) throw ParameterError("output_interval must be positive");
  if (!(run.cfl_safety > 0.0 && run.cfl_safety <= 1.0)) {
    throw ParameterError("cfl_safety must lie in (0, 1]");
  }
  if (std::abs(f0.mass() - 1.0) > 1e-8) throw ParameterError("initial density is not normalized");

  Stepper stepper(f0.spec(), params, model, run.variant);
  SolveResult result{ObservableSeries{}, {}, f0, 0.0, f0.min_value(), 0};
  DensityGrid& f = result.final_density;

  std::vector<double> snaps(run.snapshot_times);
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  while (next_snap < snaps.size() && snaps[next_snap] <= 0.0) {
    result.snapshots.emplace(snaps[next_snap++], f);
  }

  // Output times are k * interval; the final record is at t_end exactly.
  std::int64_t next_out = 1;
  auto output_time = [&](std::int64_t k) {
    return std::min(run.t_end, static_cast<double>(k) * run.output_interval);
  };
  const double eps = 1e-12 * std::max(1.0, run.t_end);

  Coefficients c;
  double t = 0.0;
  Moments m = stepper.moments(f.values());
  result.series.push_back({t, m.a, m.b, {}, {}, {}});
  while (t < run.t_end - eps) {
    double target = output_time(next_out);
    if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap]);
    stepper.coefficients(m, c);
    const double dt = stable_dt(f.spec(), c, run.cfl_safety, target - t);
    stepper.advance(f.values(), c, dt);
    ++result.steps;
    t = (target - t - dt <= eps) ? target : t + dt;

    result.max_mass_residual = std::max(result.max_mass_residual, std::abs(f.mass() - 1.0));
    result.min_value = std::min(result.min_value, f.min_value());
    m = stepper.moments(f.values());

    while (next_snap < snaps.size() && snaps[next_snap] <= t + eps) {
      result.snapshots.emplace(snaps[next_snap++], f);
    }
    if (t >= output_time(next_out) - eps) {
      result.series.push_back({t, m.a, m.b, {}, {}, {}});
      while (output_time(next_out) <= t + eps && output_time(next_out) < run.t_end) ++next_out;
    }
  }
  return result;
}

DensityGrid sorted_density(const GridSpec& grid, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw ParameterError("kappa must lie in (0, 1)");
  if (grid.cells < 2) throw ParameterError("sorted density needs at least two cells");
  DensityGrid f(grid);
  f[grid.cells - 1] = kappa / grid.dq();
  f[0] = (1.0 - kappa) / grid.dq();
  return f;
}

DensityGrid gaussian_with_mean_entry(const GridSpec& grid, const ProbabilityModel& model,
                                     double sd, double target_a, double* mean_out) {
  require_logistic(model);
  if (!(target_a > 0.0 && target_a < 1.0)) throw ParameterError("target a must lie in (0, 1)");
  double lo = grid.q_min, hi = grid.q_max;
  const auto a_of = [&](double mean) { return moments(gaussian_density(grid, mean, sd), model).a; };
  if (!(a_of(lo) < target_a && a_of(hi) > target_a)) {
    throw ParameterError("target a is not reachable with a gaussian on this grid");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (a_of(mid) < target_a ? lo : hi) = mid;
  }
  const double mean = 0.5 * (lo + hi);
  if (mean_out != nullptr) *mean_out = mean;
  return gaussian_density(grid, mean, sd);
}

}  // namespace entrydyn::kinetic
