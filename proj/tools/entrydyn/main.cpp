#include <iostream>

#include <CLI11.hpp>

#include "entrydyn/analysis.hpp"
#include "entrydyn/commands.hpp"
#include "entrydyn/errors.hpp"

using namespace entrydyn::cli;

namespace {

void add_run_flags(CLI::App* cmd, std::string& config_path, Overrides& o) {
  cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
  cmd->add_option("--seed", o.seed, "Override the seed");
  cmd->add_option("--out", o.out, "Override the output directory");
  cmd->add_option("--t-end", o.t_end, "Override t_end");
  cmd->add_option("--replicas", o.replicas, "Override the replica count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Market entry game learning dynamics: agent-based and mean-field engines"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  auto* abm = app.add_subcommand("abm", "Run the agent-based engine");
  add_run_flags(abm, config_path, overrides);
  auto* pde = app.add_subcommand("pde", "Run the drift-diffusion solver");
  add_run_flags(pde, config_path, overrides);

  AnalyzeOptions analyze_opts;
  auto* analyze = app.add_subcommand("analyze", "Fit learning and sorting time scales");
  analyze->add_option("--series", analyze_opts.series_path, "series.csv to analyze")->required();
  analyze->add_option("--run", analyze_opts.run_path, "run.json with parameters and c_p");
  analyze->add_option("--config", analyze_opts.config_path, "Run configuration (JSON)");
  analyze->add_option("--c-p", analyze_opts.c_p, "Learning prefactor c_p");
  analyze->add_option("--out", analyze_opts.out_dir, "Directory for fits.json");
  analyze->add_option("--rate-factor", analyze_opts.rate_factor, "Allowed factor on fitted rates");
  analyze->add_option("--min-separation", analyze_opts.min_separation,
                      "Minimum fitted tau_s / tau_al");
  analyze->add_option("--epsilon", analyze_opts.epsilon, "Sorting window threshold");

  CompareOptions compare_opts;
  auto* compare = app.add_subcommand("compare", "Compare two series files");
  compare->add_option("first", compare_opts.first, "First series.csv")->required();
  compare->add_option("second", compare_opts.second, "Second series.csv")->required();
  compare->add_option("--out", compare_opts.out_dir, "Directory for compare.json");
  compare->add_option("--t-min", compare_opts.t_min, "Start of the comparison window");
  compare->add_option("--t-max", compare_opts.t_max, "End of the comparison window");
  compare->add_option("--tolerance", compare_opts.tolerance, "Fail when sup|a1 - a2| exceeds this");

  OracleOptions oracle_opts;
  auto* oracle = app.add_subcommand("oracle-check", "Check exact one-round identities");
  oracle->add_option("--config", oracle_opts.config_path, "Small configuration (N <= 12)");
  oracle->add_option("--max-agents", oracle_opts.max_agents, "Largest random population");
  oracle->add_option("--instances", oracle_opts.instances, "Random instances");
  oracle->add_option("--tolerance", oracle_opts.tolerance, "Absolute tolerance");
  oracle->add_option("--seed", oracle_opts.seed, "Instance generator seed");
  oracle->add_option("--out", oracle_opts.out_dir, "Directory for oracle_report.json");

  std::string plots_dir = ".";
  auto* plots = app.add_subcommand("make-plots", "Emit a gnuplot script for a run directory");
  plots->add_option("--out", plots_dir, "Run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*abm || *pde) {
      auto config = load_config(config_path);
      apply_overrides(config, overrides);
      return *abm ? cmd_abm(config, std::cout) : cmd_pde(config, std::cout);
    }
    if (*analyze) return cmd_analyze(analyze_opts, std::cout);
    if (*compare) return cmd_compare(compare_opts, std::cout);
    if (*oracle) return cmd_oracle_check(oracle_opts, std::cout);
    if (*plots) return cmd_make_plots(plots_dir, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const entrydyn::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const entrydyn::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
