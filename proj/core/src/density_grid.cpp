#include "entrydyn/density_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "entrydyn/errors.hpp"

namespace entrydyn {

std::size_t GridSpec::cell_of(double q) const {
  if (!(q > q_min)) return 0;
  const double k = std::floor((q - q_min) / dq());
  if (k >= static_cast<double>(cells)) return cells - 1;
  return static_cast<std::size_t>(k);
}

void GridSpec::validate() const {
  if (cells == 0) throw ParameterError("grid must have at least one cell");
  if (!(q_max > q_min) || !std::isfinite(q_min) || !std::isfinite(q_max)) {
    throw ParameterError("grid requires finite q_min < q_max");
  }
}

DensityGrid::DensityGrid(GridSpec spec) : spec_(spec) {
  spec_.validate();
  values_.assign(spec_.cells, 0.0);
}

DensityGrid::DensityGrid(GridSpec spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.cells) throw ParameterError("density size does not match grid");
}

double DensityGrid::mass() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) * dq();
}

double DensityGrid::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

double DensityGrid::mean() const {
  double s = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) s += center(k) * values_[k];
  return s * dq() / mass();
}

void DensityGrid::normalize() {
  const double m = mass();
  if (!(m > 0.0)) throw ParameterError("cannot normalize a density with zero mass");
  for (auto& v : values_) v /= m;
}

DensityGrid gaussian_density(const GridSpec& spec, double mean, double sd) {
  if (!(sd > 0.0)) throw ParameterError("gaussian density needs sd > 0");
  DensityGrid f(spec);
  const double inv = 1.0 / (sd * std::sqrt(2.0));
  for (std::size_t k = 0; k < spec.cells; ++k) {
    const double lo = std::erf((spec.face(k) - mean) * inv);
    const double hi = std::erf((spec.face(k + 1) - mean) * inv);
    f[k] = 0.5 * (hi - lo) / spec.dq();
  }
  f.normalize();
  return f;
}

}  // namespace entrydyn
