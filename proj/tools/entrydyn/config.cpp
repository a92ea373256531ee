#include "entrydyn/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "entrydyn/errors.hpp"
#include "entrydyn/kinetic.hpp"

namespace entrydyn::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  for (const auto& item : obj.items()) {
    if (!known.contains(item.key())) {
      throw ConfigError("unknown key '" + (where.empty() ? "" : where + ".") + item.key() + "'");
    }
  }
}

const json& require_object(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ConfigError("missing required key '" + key + "'");
  const auto& v = doc.at(key);
  if (!v.is_object()) throw ConfigError("key '" + key + "' must be an object");
  return v;
}

double get_real(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("key '" + path + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("key '" + path + "' must be finite");
  return x;
}

std::int64_t get_int(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError("key '" + path + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("key '" + path + "' must be a string");
  return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError("key '" + path + "' must be a boolean");
  return v.get<bool>();
}

GameParams parse_game(const json& g) {
  reject_unknown(g, "game",
                 {"n_agents", "capacity", "payoff_scale", "rounds_per_unit", "rule",
                  "outside_payoff"});
  for (const char* key : {"n_agents", "capacity", "payoff_scale", "rounds_per_unit"}) {
    if (!g.contains(key)) throw ConfigError(std::string("missing required key 'game.") + key + "'");
  }
  const auto n = get_int(g, "n_agents", "game.n_agents");
  const auto c = get_int(g, "capacity", "game.capacity");
  const auto h = get_real(g, "payoff_scale", "game.payoff_scale");
  const auto m = get_int(g, "rounds_per_unit", "game.rounds_per_unit");
  const double v = g.contains("outside_payoff") ? get_real(g, "outside_payoff", "game.outside_payoff")
                                                : 0.0;
  LearningRule rule = LearningRule::BasicReinforcement;
  if (g.contains("rule")) {
    try {
      rule = learning_rule_from_string(get_string(g, "rule", "game.rule"));
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("key 'game.rule': ") + e.what());
    }
  }
  if (n < 1) throw ConfigError("key 'game.n_agents' must be positive");
  if (c < 1 || c >= n) {
    throw ConfigError("key 'game.capacity' must satisfy 0 < capacity < n_agents (got capacity=" +
                      std::to_string(c) + ", n_agents=" + std::to_string(n) + ")");
  }
  if (!(h > 0.0)) throw ConfigError("key 'game.payoff_scale' must be positive");
  if (m < 1) throw ConfigError("key 'game.rounds_per_unit' must be positive");
  if (v != 0.0) throw ConfigError("key 'game.outside_payoff' must be 0");
  return GameParams(n, c, h, m, rule, v);
}

ProbabilityModel parse_model(const json& m) {
  if (!m.contains("type")) throw ConfigError("missing required key 'model.type'");
  const auto type = get_string(m, "type", "model.type");
  if (type == "logistic") {
    reject_unknown(m, "model", {"type", "scale", "center"});
    Logistic l;
    if (m.contains("scale")) l.scale = get_real(m, "scale", "model.scale");
    if (m.contains("center")) l.center = get_real(m, "center", "model.center");
    if (!(l.scale > 0.0)) throw ConfigError("key 'model.scale' must be positive");
    return l;
  }
  if (type == "erev_roth") {
    reject_unknown(m, "model", {"type", "baseline"});
    ErevRothRatio e;
    if (m.contains("baseline")) e.baseline = get_real(m, "baseline", "model.baseline");
    if (!(e.baseline > 0.0)) throw ConfigError("key 'model.baseline' must be positive");
    return e;
  }
  throw ConfigError("key 'model.type' must be 'logistic' or 'erev_roth' (got '" + type + "')");
}

GridSpec parse_grid(const json& g) {
  reject_unknown(g, "grid", {"q_min", "q_max", "cells"});
  GridSpec spec;
  if (g.contains("q_min")) spec.q_min = get_real(g, "q_min", "grid.q_min");
  if (g.contains("q_max")) spec.q_max = get_real(g, "q_max", "grid.q_max");
  if (g.contains("cells")) {
    const auto k = get_int(g, "cells", "grid.cells");
    if (k < 2) throw ConfigError("key 'grid.cells' must be at least 2");
    spec.cells = static_cast<std::size_t>(k);
  }
  if (!(spec.q_max > spec.q_min)) throw ConfigError("key 'grid.q_max' must exceed 'grid.q_min'");
  return spec;
}

InitSpec parse_init(const json& i) {
  if (!i.contains("type")) throw ConfigError("missing required key 'init.type'");
  const auto type = get_string(i, "type", "init.type");
  if (type == "all_equal") {
    reject_unknown(i, "init", {"type", "value", "target_p"});
    init_spec::AllEqual out;
    if (i.contains("value")) out.value = get_real(i, "value", "init.value");
    if (i.contains("target_p")) out.target_p = get_real(i, "target_p", "init.target_p");
    if (!out.value && !out.target_p) {
      throw ConfigError("key 'init': all_equal needs 'value' or 'target_p'");
    }
    return out;
  }
  if (type == "gaussian") {
    reject_unknown(i, "init", {"type", "mean", "target_a", "sd", "snap_to_lattice",
                               "lattice_offset"});
    init_spec::Gaussian out;
    if (i.contains("mean")) out.mean = get_real(i, "mean", "init.mean");
    if (i.contains("target_a")) out.target_a = get_real(i, "target_a", "init.target_a");
    if (!out.mean && !out.target_a) {
      throw ConfigError("key 'init': gaussian needs 'mean' or 'target_a'");
    }
    if (i.contains("sd")) out.sd = get_real(i, "sd", "init.sd");
    if (!(out.sd >= 0.0)) throw ConfigError("key 'init.sd' must be non-negative");
    if (i.contains("snap_to_lattice")) {
      out.snap_to_lattice = get_bool(i, "snap_to_lattice", "init.snap_to_lattice");
    }
    if (i.contains("lattice_offset")) {
      out.lattice_offset = get_real(i, "lattice_offset", "init.lattice_offset");
    }
    return out;
  }
  if (type == "explicit") {
    reject_unknown(i, "init", {"type", "values"});
    if (!i.contains("values") || !i.at("values").is_array()) {
      throw ConfigError("key 'init.values' must be an array of numbers");
    }
    init_spec::Explicit out;
    for (const auto& v : i.at("values")) {
      if (!v.is_number()) throw ConfigError("key 'init.values' must contain only numbers");
      out.values.push_back(v.get<double>());
    }
    return out;
  }
  if (type == "sorted") {
    reject_unknown(i, "init", {"type"});
    return init_spec::Sorted{};
  }
  throw ConfigError("key 'init.type' must be all_equal, gaussian, explicit or sorted (got '" +
                    type + "')");
}

void resolve_targets(RunConfig& cfg) {
  // An explicit value/mean next to a target is an already-resolved echo and wins.
  if (auto* eq = std::get_if<init_spec::AllEqual>(&cfg.init); eq && eq->target_p && !eq->value) {
    if (!(*eq->target_p > 0.0 && *eq->target_p < 1.0)) {
      throw ConfigError("key 'init.target_p' must lie in (0, 1)");
    }
    eq->value = propensity_for_probability(cfg.model, *eq->target_p);
  }
  if (auto* g = std::get_if<init_spec::Gaussian>(&cfg.init); g && g->target_a && !g->mean) {
    if (!cfg.model.is_logistic()) {
      throw ConfigError("key 'init.target_a' requires a logistic model; give 'init.mean'");
    }
    if (!(g->sd > 0.0)) throw ConfigError("key 'init.target_a' requires 'init.sd' > 0");
    double mean = 0.0;
    try {
      kinetic::gaussian_with_mean_entry(cfg.grid, cfg.model, g->sd, *g->target_a, &mean);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("key 'init.target_a': ") + e.what());
    }
    g->mean = mean;
  }
  if (const auto* ex = std::get_if<init_spec::Explicit>(&cfg.init)) {
    if (ex->values.size() != static_cast<std::size_t>(cfg.game.n_agents())) {
      throw ConfigError("key 'init.values' must have n_agents entries");
    }
  }
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(doc, "",
                 {"game", "model", "engine", "init", "t_end", "replicas", "seed", "grid",
                  "output_dir", "output_stride", "pde", "snapshots"});
  RunConfig cfg;
  cfg.game = parse_game(require_object(doc, "game"));
  if (doc.contains("model")) cfg.model = parse_model(require_object(doc, "model"));
  if (doc.contains("engine")) {
    const auto e = get_string(doc, "engine", "engine");
    if (e == "abm") cfg.engine = Engine::Abm;
    else if (e == "pde") cfg.engine = Engine::Pde;
    else if (e == "both") cfg.engine = Engine::Both;
    else throw ConfigError("key 'engine' must be abm, pde or both (got '" + e + "')");
  }
  if (doc.contains("grid")) cfg.grid = parse_grid(require_object(doc, "grid"));
  if (doc.contains("init")) cfg.init = parse_init(require_object(doc, "init"));
  if (doc.contains("t_end")) cfg.t_end = get_real(doc, "t_end", "t_end");
  if (!(cfg.t_end > 0.0)) throw ConfigError("key 't_end' must be positive");
  if (doc.contains("replicas")) cfg.replicas = get_int(doc, "replicas", "replicas");
  if (cfg.replicas < 1) throw ConfigError("key 'replicas' must be at least 1");
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned()) throw ConfigError("key 'seed' must be a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("output_dir")) cfg.output_dir = get_string(doc, "output_dir", "output_dir");
  if (doc.contains("output_stride")) {
    cfg.output_stride = get_int(doc, "output_stride", "output_stride");
  }
  if (cfg.output_stride < 1) throw ConfigError("key 'output_stride' must be at least 1");
  if (doc.contains("pde")) {
    const auto& p = require_object(doc, "pde");
    reject_unknown(p, "pde", {"cfl_safety", "output_interval"});
    if (p.contains("cfl_safety")) cfg.cfl_safety = get_real(p, "cfl_safety", "pde.cfl_safety");
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0)) {
      throw ConfigError("key 'pde.cfl_safety' must lie in (0, 1]");
    }
    if (p.contains("output_interval")) {
      cfg.pde_output_interval = get_real(p, "output_interval", "pde.output_interval");
      if (!(*cfg.pde_output_interval > 0.0)) {
        throw ConfigError("key 'pde.output_interval' must be positive");
      }
    }
  }
  if (doc.contains("snapshots")) {
    const auto& s = doc.at("snapshots");
    if (!s.is_array()) throw ConfigError("key 'snapshots' must be an array of times");
    for (const auto& v : s) {
      if (!v.is_number() || v.get<double>() < 0.0) {
        throw ConfigError("key 'snapshots' must contain non-negative times");
      }
      cfg.snapshots.push_back(v.get<double>());
    }
  }
  resolve_targets(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

std::string_view to_string(Engine engine) {
  switch (engine) {
    case Engine::Abm:
      return "abm";
    case Engine::Pde:
      return "pde";
    case Engine::Both:
      return "both";
  }
  return "abm";
}

json to_json(const RunConfig& c) {
  json out;
  out["game"] = {{"n_agents", c.game.n_agents()},
                 {"capacity", c.game.capacity()},
                 {"payoff_scale", c.game.payoff_scale()},
                 {"rounds_per_unit", c.game.rounds_per_unit()},
                 {"rule", std::string(entrydyn::to_string(c.game.rule()))},
                 {"outside_payoff", c.game.outside_payoff()}};
  if (const auto* l = std::get_if<Logistic>(&c.model.variant())) {
    out["model"] = {{"type", "logistic"}, {"scale", l->scale}, {"center", l->center}};
  } else {
    out["model"] = {{"type", "erev_roth"},
                    {"baseline", std::get<ErevRothRatio>(c.model.variant()).baseline}};
  }
  out["engine"] = std::string(to_string(c.engine));
  std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, init_spec::AllEqual>) {
          out["init"] = {{"type", "all_equal"}, {"value", *spec.value}};
          if (spec.target_p) out["init"]["target_p"] = *spec.target_p;
        } else if constexpr (std::is_same_v<T, init_spec::Gaussian>) {
          out["init"] = {{"type", "gaussian"},
                         {"mean", *spec.mean},
                         {"sd", spec.sd},
                         {"snap_to_lattice", spec.snap_to_lattice},
                         {"lattice_offset", spec.lattice_offset}};
          if (spec.target_a) out["init"]["target_a"] = *spec.target_a;
        } else if constexpr (std::is_same_v<T, init_spec::Explicit>) {
          out["init"] = {{"type", "explicit"}, {"values", spec.values}};
        } else {
          out["init"] = {{"type", "sorted"}};
        }
      },
      c.init);
  out["t_end"] = c.t_end;
  out["replicas"] = c.replicas;
  out["seed"] = c.seed;
  out["grid"] = {{"q_min", c.grid.q_min}, {"q_max", c.grid.q_max}, {"cells", c.grid.cells}};
  out["output_dir"] = c.output_dir;
  out["output_stride"] = c.output_stride;
  out["pde"] = {{"cfl_safety", c.cfl_safety},
                {"output_interval", c.pde_output_interval_or_default()}};
  out["snapshots"] = c.snapshots;
  return out;
}

abm::InitialCondition resolve_abm_init(const RunConfig& c) {
  return std::visit(
      [&](const auto& spec) -> abm::InitialCondition {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, init_spec::AllEqual>) {
          return abm::init::AllEqual{*spec.value};
        } else if constexpr (std::is_same_v<T, init_spec::Gaussian>) {
          return abm::init::Gaussian{*spec.mean, spec.sd, spec.snap_to_lattice,
                                     spec.lattice_offset};
        } else if constexpr (std::is_same_v<T, init_spec::Explicit>) {
          return abm::init::Explicit{spec.values};
        } else {
          const auto n = static_cast<std::size_t>(c.game.n_agents());
          const auto enter = static_cast<std::size_t>(c.game.capacity());
          std::vector<double> q(n, c.grid.center(0));
          for (std::size_t i = 0; i < enter; ++i) q[i] = c.grid.center(c.grid.cells - 1);
          return abm::init::Explicit{std::move(q)};
        }
      },
      c.init);
}

DensityGrid resolve_pde_init(const RunConfig& c) {
  return std::visit(
      [&](const auto& spec) -> DensityGrid {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, init_spec::AllEqual>) {
          DensityGrid f(c.grid);
          f[c.grid.cell_of(*spec.value)] = 1.0 / c.grid.dq();
          return f;
        } else if constexpr (std::is_same_v<T, init_spec::Gaussian>) {
          if (spec.sd == 0.0) {
            DensityGrid f(c.grid);
            f[c.grid.cell_of(*spec.mean)] = 1.0 / c.grid.dq();
            return f;
          }
          return gaussian_density(c.grid, *spec.mean, spec.sd);
        } else if constexpr (std::is_same_v<T, init_spec::Explicit>) {
          const abm::PopulationState state(spec.values, 0, c.game.tau());
          return abm::empirical_density(state, c.grid).density;
        } else {
          return kinetic::sorted_density(c.grid, c.game.kappa());
        }
      },
      c.init);
}

}  // namespace entrydyn::cli
