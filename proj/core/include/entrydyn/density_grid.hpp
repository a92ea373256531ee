#ifndef ENTRYDYN_DENSITY_GRID_HPP
#define ENTRYDYN_DENSITY_GRID_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace entrydyn {

/// Uniform cell layout on [q_min, q_max].
struct GridSpec {
  double q_min = -12.0;
  double q_max = 12.0;
  std::size_t cells = 800;

  double dq() const { return (q_max - q_min) / static_cast<double>(cells); }
  double center(std::size_t k) const { return q_min + (static_cast<double>(k) + 0.5) * dq(); }
  /// Face k sits between cells k-1 and k; faces 0 and `cells` are the boundaries.
  double face(std::size_t k) const { return q_min + static_cast<double>(k) * dq(); }
  /// Cell containing q, clamped to the end cells.
  std::size_t cell_of(double q) const;

  void validate() const;
};

/// Piecewise-constant density f on a GridSpec. Values are per unit propensity.
class DensityGrid {
 public:
  explicit DensityGrid(GridSpec spec);
  DensityGrid(GridSpec spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }
  double dq() const { return spec_.dq(); }
  double center(std::size_t k) const { return spec_.center(k); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }

  /// Sum f_k dq.
  double mass() const;
  double min_value() const;
  /// Sum q_k f_k dq.
  double mean() const;

  /// Scale values so mass() == 1.
  void normalize();

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// Cell-averaged normal density, normalized on the grid.
DensityGrid gaussian_density(const GridSpec& spec, double mean, double sd);

}  // namespace entrydyn

#endif  // ENTRYDYN_DENSITY_GRID_HPP
