#ifndef ENTRYDYN_TOOLS_CONFIG_HPP
#define ENTRYDYN_TOOLS_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "entrydyn/abm.hpp"
#include "entrydyn/density_grid.hpp"
#include "entrydyn/game.hpp"
#include "entrydyn/probability.hpp"

namespace entrydyn::cli {

/// Validation failure in a run configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Engine { Abm, Pde, Both };

namespace init_spec {
struct AllEqual {
  std::optional<double> value;
  std::optional<double> target_p;
};
struct Gaussian {
  std::optional<double> mean;
  std::optional<double> target_a;
  double sd = 1.0;
  bool snap_to_lattice = false;
  double lattice_offset = 0.0;
};
struct Explicit {
  std::vector<double> values;
};
/// kappa N agents (or mass kappa) at the right grid edge, the rest at the left edge.
struct Sorted {};
}  // namespace init_spec

using InitSpec =
    std::variant<init_spec::AllEqual, init_spec::Gaussian, init_spec::Explicit, init_spec::Sorted>;

struct RunConfig {
  GameParams game{1000, 500, 0.01, 100, LearningRule::BasicReinforcement};
  ProbabilityModel model{Logistic{1.0, 0.0}};
  Engine engine = Engine::Abm;
  InitSpec init = init_spec::Gaussian{std::nullopt, 0.2, 1.0, false, 0.0};
  double t_end = 1.0;
  std::int64_t replicas = 1;
  std::uint64_t seed = 1;
  GridSpec grid{};
  std::string output_dir = "out";
  std::int64_t output_stride = 1;
  double cfl_safety = 0.4;
  std::optional<double> pde_output_interval;
  std::vector<double> snapshots;

  double pde_output_interval_or_default() const {
    return pde_output_interval.value_or(static_cast<double>(output_stride) * game.tau());
  }
};

/// Parses and validates; unknown keys and invariant violations throw
/// ConfigError naming the offending key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Echo of the configuration with every default filled in.
nlohmann::json to_json(const RunConfig& config);

/// Initial gaussian mean after resolving a target_a (logistic models only).
abm::InitialCondition resolve_abm_init(const RunConfig& config);
DensityGrid resolve_pde_init(const RunConfig& config);

std::string_view to_string(Engine engine);

}  // namespace entrydyn::cli

#endif  // ENTRYDYN_TOOLS_CONFIG_HPP
