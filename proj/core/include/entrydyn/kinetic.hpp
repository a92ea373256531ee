#ifndef ENTRYDYN_KINETIC_HPP
#define ENTRYDYN_KINETIC_HPP

#include <map>
#include <vector>

#include "entrydyn/density_grid.hpp"
#include "entrydyn/game.hpp"
#include "entrydyn/probability.hpp"
#include "entrydyn/series.hpp"

namespace entrydyn::kinetic {

/// EqA is the mean-field equation of basic reinforcement (transport and
/// diffusion act on p f); EqB is that of fictitious play (act on f).
enum class Variant { EqA, EqB };

Variant variant_for(LearningRule rule);

struct PdeRunParams {
  Variant variant = Variant::EqA;
  double cfl_safety = 0.4;
  double t_end = 1.0;
  double output_interval = 0.01;
  std::vector<double> snapshot_times;
};

struct Moments {
  double a = 0.0;
  double b = 0.0;
};

/// Midpoint-rule a and b. Logistic models only.
Moments moments(const DensityGrid& f, const ProbabilityModel& model);

/// Integral of p'(q) p(q) f(q) dq (midpoint rule).
double learning_prefactor(const DensityGrid& f, const ProbabilityModel& model);

/// Conservative flux-form coefficients at the K+1 cell faces.
struct Coefficients {
  double drift_scale = 0.0;      // r (kappa - a)
  double diffusion_scale = 0.0;  // D = (r N h (kappa - a)^2 + r h b) / 2
  std::vector<double> velocity;     // v at faces
  std::vector<double> diffusivity;  // mu at faces
};

/// EqA: v = r(kappa - a) p - D p', mu = D p, which is the flux form of
/// r(kappa - a) d_q(p f) - D d_qq(p f). EqB: v = r(kappa - a), mu = D.
Coefficients coefficients(double a, double b, const GameParams& params,
                          const ProbabilityModel& model, const GridSpec& grid, Variant variant);

/// cfl_safety * min(dq / max|v|, dq^2 / (2 max mu)), capped at `cap`.
double stable_dt(const GridSpec& grid, const Coefficients& coeffs, double cfl_safety, double cap);

/// Flux update with given (frozen) coefficients, no stability check.
DensityGrid advance(const DensityGrid& f, const Coefficients& coeffs, double dt);

/// One explicit Euler step of the upwind/central finite-volume scheme with
/// no-flux boundaries. Recomputes (a, b) from f. Throws NumericalError if
/// dt exceeds the stability bound or a value becomes non-finite.
DensityGrid step(const DensityGrid& f, double dt, const GameParams& params,
                 const ProbabilityModel& model, Variant variant);

struct SolveResult {
  ObservableSeries series;
  std::map<double, DensityGrid> snapshots;
  DensityGrid final_density;
  double max_mass_residual = 0.0;  // max |mass - 1| over all steps
  double min_value = 0.0;          // min f over all steps
  std::size_t steps = 0;
};

/// Advances f0 to t_end with adaptive steps, recording (t, a, b) on the
/// output grid.
SolveResult solve(const DensityGrid& f0, const GameParams& params, const ProbabilityModel& model,
                  const PdeRunParams& run);

/// Two delta-like spikes: mass kappa in the last cell, 1 - kappa in the first.
DensityGrid sorted_density(const GridSpec& grid, double kappa);

/// Gaussian density with standard deviation `sd` whose mean is chosen so the
/// grid moment a equals `target_a`.
DensityGrid gaussian_with_mean_entry(const GridSpec& grid, const ProbabilityModel& model,
                                     double sd, double target_a, double* mean_out = nullptr);

}  // namespace entrydyn::kinetic

#endif  // ENTRYDYN_KINETIC_HPP
