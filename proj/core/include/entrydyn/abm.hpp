#ifndef ENTRYDYN_ABM_HPP
#define ENTRYDYN_ABM_HPP

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "entrydyn/density_grid.hpp"
#include "entrydyn/game.hpp"
#include "entrydyn/probability.hpp"
#include "entrydyn/series.hpp"

namespace entrydyn::abm {

/// Per-replica generator. Seeded through std::seed_seq so that nearby seeds
/// give decorrelated streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform() { return canonical_(engine_); }
  double normal(double mean, double sd) { return std::normal_distribution<double>(mean, sd)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> canonical_{0.0, 1.0};
};

/// The N individual propensities at a round index.
class PopulationState {
 public:
  PopulationState(std::vector<double> propensities, std::int64_t round_index, double tau);

  std::span<const double> propensities() const { return propensities_; }
  std::size_t size() const { return propensities_.size(); }
  std::int64_t round_index() const { return round_index_; }
  double time() const { return static_cast<double>(round_index_) * tau_; }
  double tau() const { return tau_; }

 private:
  friend struct StateAccess;
  std::vector<double> propensities_;
  std::int64_t round_index_;
  double tau_;
};

struct RoundOutcome {
  std::vector<bool> entered;
  std::int64_t m = 0;
  double t = 0.0;  // time at which the decisions were taken
};

namespace init {
struct AllEqual {
  double value = 0.0;
};
struct Gaussian {
  double mean = 0.0;
  double sd = 1.0;
  bool snap_to_lattice = false;
  double lattice_offset = 0.0;
};
struct Explicit {
  std::vector<double> values;
};
}  // namespace init

using InitialCondition = std::variant<init::AllEqual, init::Gaussian, init::Explicit>;

PopulationState init_population(const GameParams& params, const InitialCondition& init,
                                std::uint64_t seed);

/// One round: every agent decides from the pre-round propensities, the
/// entrant count is reduced, then every propensity is updated with that count.
std::pair<PopulationState, RoundOutcome> play_round(const PopulationState& state,
                                                     const GameParams& params,
                                                     const ProbabilityModel& model, Rng& rng);

struct Moments {
  double a = 0.0;
  double b = 0.0;
};

/// a = mean p(q_i), b = mean p(q_i)(1 - p(q_i)).
Moments empirical_moments(const PopulationState& state, const ProbabilityModel& model);

/// (1/N) sum p'(q_i) p(q_i), the prefactor of the linearized mean-entry equation.
double learning_prefactor(const PopulationState& state, const ProbabilityModel& model);

struct HistogramResult {
  DensityGrid density;
  double out_of_range_mass = 0.0;  // fraction of agents clamped into an end cell
};

HistogramResult empirical_density(const PopulationState& state, const GridSpec& grid);

struct SimulationOptions {
  double t_end = 1.0;
  std::int64_t record_stride = 1;
  /// Times at which density snapshots are taken (first record at or after each).
  std::vector<double> snapshot_times;
  GridSpec snapshot_grid;
};

struct SimulationResult {
  ObservableSeries series;
  std::map<double, DensityGrid> snapshots;  // keyed by requested time
  PopulationState final_state;
};

/// Plays ceil(t_end * M) rounds, recording (t, a, b, m/N) every stride
/// rounds; a, b and m/N belong to the round played from the recorded state.
/// The final record's entrant count is sampled from the final state without
/// applying its update.
SimulationResult simulate(const GameParams& params, const ProbabilityModel& model,
                          const InitialCondition& init, std::uint64_t seed,
                          const SimulationOptions& options);

/// Pointwise mean and standard error across `replicas` independent runs;
/// replica i uses seed base_seed + i * seed_stride. Snapshots and the final
/// state come from replica 0. `threads` = 0 picks the hardware concurrency,
/// capped by ENTRYDYN_THREADS.
SimulationResult ensemble_run(const GameParams& params, const ProbabilityModel& model,
                              const InitialCondition& init, std::int64_t replicas,
                              std::uint64_t base_seed, const SimulationOptions& options,
                              unsigned threads = 0, std::uint64_t seed_stride = 1);

/// Worker count honouring the ENTRYDYN_THREADS cap.
unsigned worker_threads(unsigned requested = 0);

}  // namespace entrydyn::abm

#endif  // ENTRYDYN_ABM_HPP
