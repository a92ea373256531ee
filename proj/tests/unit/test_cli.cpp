#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "entrydyn/series.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Sandbox {
  fs::path root;
  Sandbox() {
    root = fs::temp_directory_path() /
           ("entrydyn_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Sandbox() { fs::remove_all(root); }
  static int& counter() {
    static int n = 0;
    return n;
  }
  fs::path write(const std::string& name, const json& doc) const {
    const auto p = root / name;
    std::ofstream(p) << doc.dump(1);
    return p;
  }
};

struct Run {
  int code;
  std::string output;
};

Run run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(ENTRYDYN_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_game(int n, int c) {
  return {{"n_agents", n}, {"capacity", c}, {"payoff_scale", 0.05}, {"rounds_per_unit", 20},
          {"rule", "basic"}};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("capacity at N is a configuration error") {
  Sandbox box;
  const auto cfg = box.write("c.json", {{"game", small_game(10, 10)},
                                        {"model", {{"type", "logistic"}, {"scale", 1.0}}},
                                        {"engine", "abm"},
                                        {"init", {{"type", "all_equal"}, {"value", 0.0}}},
                                        {"t_end", 1.0}});
  const auto r = run_cli("abm --config " + cfg.string(), box.root / "log");
  CHECK(r.code == 2);
  CHECK(r.output.find("capacity") != std::string::npos);
}

TEST_CASE("unknown keys are rejected by name") {
  Sandbox box;
  const auto cfg = box.write("c.json", {{"game", small_game(10, 4)},
                                        {"model", {{"type", "logistic"}, {"scale", 1.0}}},
                                        {"t_end", 1.0},
                                        {"tend", 2.0}});
  const auto r = run_cli("abm --config " + cfg.string(), box.root / "log");
  CHECK(r.code == 2);
  CHECK(r.output.find("tend") != std::string::npos);
}

TEST_CASE("negative propensities under the ratio model are a domain error") {
  Sandbox box;
  const auto cfg = box.write("c.json", {{"game", small_game(50, 20)},
                                        {"model", {{"type", "erev_roth"}, {"baseline", 1.0}}},
                                        {"engine", "abm"},
                                        {"init", {{"type", "gaussian"}, {"mean", -1.0}, {"sd", 1.0}}},
                                        {"t_end", 1.0},
                                        {"output_dir", (box.root / "out").string()}});
  const auto r = run_cli("abm --config " + cfg.string(), box.root / "log");
  CHECK(r.code == 3);
  CHECK(run_cli("pde --config " + cfg.string(), box.root / "log2").code == 2);
}

TEST_CASE("oracle-check cap, pass and forced failure") {
  Sandbox box;
  const auto big = box.write("big.json", {{"game", small_game(13, 5)},
                                          {"model", {{"type", "logistic"}, {"scale", 1.0}}}});
  const auto r = run_cli("oracle-check --config " + big.string(), box.root / "log");
  CHECK(r.code == 2);
  CHECK(r.output.find("12") != std::string::npos);

  const auto ok = run_cli("oracle-check --instances 200 --out " + (box.root / "rep").string(),
                          box.root / "log2");
  CHECK(ok.code == 0);
  CHECK(ok.output.find("FAIL") == std::string::npos);
  CHECK(fs::exists(box.root / "rep" / "oracle_report.json"));

  CHECK(run_cli("oracle-check --instances 200 --tolerance 0", box.root / "log3").code == 1);
}

TEST_CASE("abm runs are byte-identical for a fixed seed") {
  Sandbox box;
  json cfg = {{"game", small_game(200, 80)},
              {"model", {{"type", "logistic"}, {"scale", 1.0}}},
              {"engine", "abm"},
              {"init", {{"type", "gaussian"}, {"target_a", 0.2}, {"sd", 1.0}}},
              {"t_end", 2.0},
              {"replicas", 3},
              {"seed", 5},
              {"snapshots", {0.0, 1.0}}};
  const auto path = box.write("c.json", cfg);
  for (const char* dir : {"a", "b"}) {
    CHECK(run_cli("abm --config " + path.string() + " --out " + (box.root / dir).string(),
                  box.root / "log")
              .code == 0);
  }
  CHECK(run_cli("abm --config " + path.string() + " --seed 6 --out " + (box.root / "c").string(),
                box.root / "log")
            .code == 0);
  const auto a = slurp(box.root / "a" / "series.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(box.root / "b" / "series.csv"));
  CHECK(a != slurp(box.root / "c" / "series.csv"));
  CHECK(slurp(box.root / "a" / "density_t1.csv") == slurp(box.root / "b" / "density_t1.csv"));

  // The echoed configuration reproduces the run.
  const json run = json::parse(slurp(box.root / "a" / "run.json"));
  auto echoed = run.at("config");
  echoed["output_dir"] = (box.root / "d").string();
  const auto again = box.write("echo.json", echoed);
  CHECK(run_cli("abm --config " + again.string(), box.root / "log").code == 0);
  CHECK(a == slurp(box.root / "d" / "series.csv"));

  std::ifstream in(box.root / "a" / "series.csv");
  const auto series = entrydyn::read_series_csv(in);
  CHECK(series.has_m_frac());
  CHECK(series.has_stderr());
  CHECK(series.back().t == doctest::Approx(2.0));
}

TEST_CASE("sorted pde run stays put") {
  Sandbox box;
  const auto cfg = box.write("c.json", {{"game", {{"n_agents", 1000}, {"capacity", 500},
                                                  {"payoff_scale", 0.01}, {"rounds_per_unit", 100},
                                                  {"rule", "fictitious"}}},
                                        {"model", {{"type", "logistic"}, {"scale", 1.0}}},
                                        {"engine", "pde"},
                                        {"init", {{"type", "sorted"}}},
                                        {"grid", {{"q_min", -16.0}, {"q_max", 16.0}, {"cells", 800}}},
                                        {"t_end", 0.5},
                                        {"output_dir", (box.root / "out").string()}});
  REQUIRE(run_cli("pde --config " + cfg.string(), box.root / "log").code == 0);
  std::ifstream in(box.root / "out" / "series.csv");
  const auto s = entrydyn::read_series_csv(in);
  for (const auto& rec : s.records()) {
    CHECK(std::abs(rec.a - s.front().a) <= 1e-6);
    CHECK(rec.b <= 1e-6);
  }
  const json run = json::parse(slurp(box.root / "out" / "run.json"));
  CHECK(run.at("mass_residual").get<double>() <= 1e-8);
  CHECK(run.at("variant").get<std::string>() == "EqB");
}

TEST_CASE("pde, analyze and compare pipeline") {
  Sandbox box;
  json cfg = {{"game", {{"n_agents", 1000}, {"capacity", 500}, {"payoff_scale", 0.01},
                        {"rounds_per_unit", 100}, {"rule", "basic"}}},
              {"model", {{"type", "logistic"}, {"scale", 1.0}}},
              {"engine", "pde"},
              {"init", {{"type", "gaussian"}, {"target_a", 0.2}, {"sd", 1.0}}},
              {"grid", {{"q_min", -12.0}, {"q_max", 12.0}, {"cells", 400}}},
              {"pde", {{"output_interval", 0.0005}}},
              {"t_end", 0.1},
              {"output_dir", (box.root / "pde").string()}};
  REQUIRE(run_cli("pde --config " + box.write("c.json", cfg).string(), box.root / "log").code == 0);
  const auto series = (box.root / "pde" / "series.csv").string();

  // Learning passes; sorting relaxes far slower than r h / 2.
  const auto r = run_cli("analyze --series " + series + " --run " +
                             (box.root / "pde" / "run.json").string(),
                         box.root / "log2");
  CHECK(r.code == 1);
  const json fits = json::parse(slurp(box.root / "pde" / "fits.json"));
  CHECK(fits.at("aggregate_learning").at("pass").get<bool>());
  CHECK_FALSE(fits.at("sorting").at("pass").get<bool>());
  CHECK_FALSE(fits.at("pass").get<bool>());

  const auto cmp = run_cli("compare " + series + " " + series + " --tolerance 0 --out " +
                               (box.root / "cmp").string(),
                           box.root / "log3");
  CHECK(cmp.code == 0);
  const json doc = json::parse(slurp(box.root / "cmp" / "compare.json"));
  CHECK(doc.dump().find("sup") != std::string::npos);

  CHECK(run_cli("analyze --series " + (box.root / "missing.csv").string() + " --c-p 0.1",
                box.root / "log4")
            .code != 0);
  CHECK(run_cli("make-plots --out " + (box.root / "pde").string(), box.root / "log5").code == 0);
  CHECK(fs::exists(box.root / "pde" / "plots.gp"));
}

}  // TEST_SUITE
