#ifndef ENTRYDYN_TOOLS_COMMANDS_HPP
#define ENTRYDYN_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "entrydyn/config.hpp"

namespace entrydyn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Top-level scalar overrides from the command line.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> t_end;
  std::optional<std::int64_t> replicas;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Writes series.csv, run.json and density_t<time>.csv snapshots.
int cmd_abm(const RunConfig& config, std::ostream& log);
int cmd_pde(const RunConfig& config, std::ostream& log);

struct AnalyzeOptions {
  std::string series_path;
  std::optional<std::string> run_path;
  std::optional<std::string> config_path;
  std::optional<double> c_p;
  std::optional<std::string> out_dir;
  double rate_factor = 2.0;
  double min_separation = 20.0;
  double epsilon = 0.05;
};

/// Writes fits.json; returns 1 when a fit fails or a verdict is negative.
int cmd_analyze(const AnalyzeOptions& options, std::ostream& log);

struct CompareOptions {
  std::string first;
  std::string second;
  std::string out_dir = ".";
  std::optional<double> t_min;
  std::optional<double> t_max;
  std::optional<double> tolerance;  // on the sup-norm of a
};

int cmd_compare(const CompareOptions& options, std::ostream& log);

struct OracleOptions {
  std::optional<std::string> config_path;
  std::int64_t max_agents = 12;
  std::int64_t instances = 1000;
  double tolerance = 1e-12;
  std::uint64_t seed = 1;
  std::optional<std::string> out_dir;
};

int cmd_oracle_check(const OracleOptions& options, std::ostream& log);

/// Writes plots.gp referencing the CSV files found in `dir` (recursively).
int cmd_make_plots(const std::string& dir, std::ostream& log);

void write_density_csv(const std::string& path, const DensityGrid& f);

}  // namespace entrydyn::cli

#endif  // ENTRYDYN_TOOLS_COMMANDS_HPP
