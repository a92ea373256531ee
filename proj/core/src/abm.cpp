#include "entrydyn/abm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "entrydyn/errors.hpp"

namespace entrydyn::abm {

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffU),
                    static_cast<std::uint32_t>(seed >> 32U)};
  engine_.seed(seq);
}

PopulationState::PopulationState(std::vector<double> propensities, std::int64_t round_index,
                                 double tau)
    : propensities_(std::move(propensities)), round_index_(round_index), tau_(tau) {
  if (propensities_.empty()) throw ParameterError("population must contain at least one agent");
  if (round_index_ < 0) throw ParameterError("round index must be non-negative");
}

struct StateAccess {
  static std::vector<double>& q(PopulationState& s) { return s.propensities_; }
  static void advance(PopulationState& s) { ++s.round_index_; }
};

PopulationState init_population(const GameParams& params, const InitialCondition& init,
                                std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(params.n_agents());
  std::vector<double> q;
  if (const auto* eq = std::get_if<init::AllEqual>(&init)) {
    q.assign(n, eq->value);
  } else if (const auto* g = std::get_if<init::Gaussian>(&init)) {
    if (!(g->sd >= 0.0)) throw ParameterError("gaussian init sd must be non-negative");
    Rng rng(seed);
    q.resize(n);
    for (auto& x : q) {
      x = g->sd > 0.0 ? rng.normal(g->mean, g->sd) : g->mean;
      if (g->snap_to_lattice) {
        const double h = params.payoff_scale();
        x = g->lattice_offset + h * std::round((x - g->lattice_offset) / h);
      }
    }
  } else {
    const auto& ex = std::get<init::Explicit>(init);
    if (ex.values.size() != n) {
      std::ostringstream os;
      os << "explicit init has " << ex.values.size() << " values, expected N=" << n;
      throw ParameterError(os.str());
    }
    q = ex.values;
  }
  return PopulationState(std::move(q), 0, params.tau());
}

namespace {

void check_domain(std::span<const double> q, const ProbabilityModel& model) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!model.in_domain(q[i])) {
      std::ostringstream os;
      os << "agent " << i << " has propensity " << q[i] << " outside the domain of "
         << model.describe();
      throw DomainError(os.str());
    }
  }
}

struct Decisions {
  std::int64_t m = 0;
  double a = 0.0;
  double b = 0.0;
};

// Decision pass: reads only pre-round propensities.
Decisions sample_decisions(std::span<const double> q, const ProbabilityModel& model, Rng& rng,
                           std::vector<bool>& entered) {
  check_domain(q, model);
  entered.assign(q.size(), false);
  Decisions d;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double p = model(q[i]);
    d.a += p;
    d.b += p * (1.0 - p);
    if (rng.uniform() < p) {
      entered[i] = true;
      ++d.m;
    }
  }
  const auto n = static_cast<double>(q.size());
  d.a /= n;
  d.b /= n;
  return d;
}

// Update pass: every agent sees the same entrant count.
void apply_update(std::vector<double>& q, const std::vector<bool>& entered, std::int64_t m,
                  const GameParams& params) {
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = update_propensity(q[i], entered[i], m, params);
}

std::int64_t round_count(double t_end, std::int64_t rounds_per_unit) {
  const double x = t_end * static_cast<double>(rounds_per_unit);
  // Absorb representation error in t_end so that t_end = k/M gives k rounds.
  return static_cast<std::int64_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
}

}  // namespace

std::pair<PopulationState, RoundOutcome> play_round(const PopulationState& state,
                                                     const GameParams& params,
                                                     const ProbabilityModel& model, Rng& rng) {
  if (state.size() != static_cast<std::size_t>(params.n_agents())) {
    throw ParameterError("population size does not match n_agents");
  }
  RoundOutcome outcome;
  outcome.t = state.time();
  const auto d = sample_decisions(state.propensities(), model, rng, outcome.entered);
  outcome.m = d.m;
  PopulationState next = state;
  apply_update(StateAccess::q(next), outcome.entered, outcome.m, params);
  StateAccess::advance(next);
  return {std::move(next), std::move(outcome)};
}

Moments empirical_moments(const PopulationState& state, const ProbabilityModel& model) {
  Moments m;
  for (const double q : state.propensities()) {
    const double p = model(q);
    m.a += p;
    m.b += p * (1.0 - p);
  }
  const auto n = static_cast<double>(state.size());
  m.a /= n;
  m.b /= n;
  return m;
}

double learning_prefactor(const PopulationState& state, const ProbabilityModel& model) {
  double s = 0.0;
  for (const double q : state.propensities()) s += model.derivative(q) * model(q);
  return s / static_cast<double>(state.size());
}

HistogramResult empirical_density(const PopulationState& state, const GridSpec& grid) {
  grid.validate();
  HistogramResult out{DensityGrid(grid), 0.0};
  const double w = 1.0 / (static_cast<double>(state.size()) * grid.dq());
  std::size_t outside = 0;
  for (const double q : state.propensities()) {
    if (q < grid.q_min || q > grid.q_max) ++outside;
    out.density[grid.cell_of(q)] += w;
  }
  out.out_of_range_mass = static_cast<double>(outside) / static_cast<double>(state.size());
  return out;
}

SimulationResult simulate(const GameParams& params, const ProbabilityModel& model,
                          const InitialCondition& init, std::uint64_t seed,
                          const SimulationOptions& options) {
  if (!(options.t_end > 0.0)) throw ParameterError("t_end must be positive");
  if (options.record_stride < 1) throw ParameterError("record stride must be at least 1");

  // Initial-state draws and round decisions use separate streams.
  PopulationState state = init_population(params, init, seed);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const std::int64_t rounds = round_count(options.t_end, params.rounds_per_unit());

  std::vector<double> pending(options.snapshot_times);
  std::sort(pending.begin(), pending.end());
  std::size_t next_snapshot = 0;

  SimulationResult result{ObservableSeries{}, {}, state};
  std::vector<bool> entered;
  auto& q = StateAccess::q(state);
  const auto n = static_cast<double>(params.n_agents());
  for (std::int64_t round = 0;; ++round) {
    const bool record = round % options.record_stride == 0 || round == rounds;
    const auto d = sample_decisions(q, model, rng, entered);
    if (record) {
      const double t = state.time();
      result.series.push_back({t, d.a, d.b, static_cast<double>(d.m) / n, {}, {}});
      while (next_snapshot < pending.size() && pending[next_snapshot] <= t + 1e-12) {
        result.snapshots.emplace(pending[next_snapshot],
                                 empirical_density(state, options.snapshot_grid).density);
        ++next_snapshot;
      }
    }
    if (round == rounds) break;
    apply_update(q, entered, d.m, params);
    StateAccess::advance(state);
  }
  result.final_state = std::move(state);
  return result;
}

unsigned worker_threads(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ENTRYDYN_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

SimulationResult ensemble_run(const GameParams& params, const ProbabilityModel& model,
                              const InitialCondition& init, std::int64_t replicas,
                              std::uint64_t base_seed, const SimulationOptions& options,
                              unsigned threads, std::uint64_t seed_stride) {
  if (replicas < 2) throw ParameterError("ensemble needs at least 2 replicas");
  const auto count = static_cast<std::size_t>(replicas);
  std::vector<std::optional<SimulationResult>> runs(count);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        SimulationOptions opts = options;
        if (i != 0) opts.snapshot_times.clear();
        runs[i] = simulate(params, model, init, base_seed + i * seed_stride, opts);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned nthreads = std::min<unsigned>(worker_threads(threads), replicas);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < nthreads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const auto& first = runs.front()->series;
  const auto r = static_cast<double>(replicas);
  SimulationResult out{ObservableSeries{}, runs.front()->snapshots, runs.front()->final_state};
  for (std::size_t k = 0; k < first.size(); ++k) {
    double sa = 0.0, sb = 0.0, sm = 0.0;
    for (const auto& run : runs) {
      sa += run->series[k].a;
      sb += run->series[k].b;
      sm += *run->series[k].m_frac;
    }
    const double ma = sa / r, mb = sb / r;
    double va = 0.0, vb = 0.0;
    for (const auto& run : runs) {
      va += (run->series[k].a - ma) * (run->series[k].a - ma);
      vb += (run->series[k].b - mb) * (run->series[k].b - mb);
    }
    va /= (r - 1.0);
    vb /= (r - 1.0);
    out.series.push_back({first[k].t, ma, mb, sm / r, std::sqrt(va / r), std::sqrt(vb / r)});
  }
  return out;
}

}  // namespace entrydyn::abm
