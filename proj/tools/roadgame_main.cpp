#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "roadgame/config.hpp"
#include "roadgame/learning.hpp"
#include "roadgame/render.hpp"
#include "roadgame/safety_game.hpp"
#include "roadgame/scenario.hpp"
#include "roadgame/strategy.hpp"
#include "roadgame/uppaal.hpp"
#include "roadgame/verify.hpp"

namespace fs = std::filesystem;
using namespace roadgame;

namespace {

// exit codes: 0 success/holds, 1 property fails or invalid scenario,
// 2 usage/input errors, 3 unrealizable, 4 configuration errors
constexpr int kExitOk = 0;
constexpr int kExitFails = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnrealizable = 3;
constexpr int kExitConfig = 4;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::io_error: return kExitUsage;
    case ErrorCode::config_error: return kExitConfig;
    case ErrorCode::unrealizable: return kExitUnrealizable;
    default: return kExitFails;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (fs::path(path).has_parent_path()) {
    fs::create_directories(fs::path(path).parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path);
  out << content;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;

  ToolConfig resolve() const {
    ToolConfig cfg =
        config_path.empty() ? parse_config_text("") : parse_config_text(read_file(config_path));
    for (const std::string& kv : overrides) {
      const size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        fail(ErrorCode::config_error, "--set expects key=value, got '" + kv + "'");
      }
      apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value configuration file");
    cmd->add_option("--set", overrides, "override one configuration key (key=value)");
  }
};

std::string trajectory_to_json(const Trajectory& tr, double time_step_size) {
  nlohmann::json j;
  j["format"] = "trajectory";
  j["version"] = 1;
  j["time_step_size"] = time_step_size;
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : tr) {
    states.push_back({{"t", s.time_step},
                      {"x", s.position.x},
                      {"y", s.position.y},
                      {"orientation", s.orientation},
                      {"velocity", s.velocity},
                      {"acceleration", s.acceleration}});
  }
  j["states"] = std::move(states);
  return j.dump(2) + "\n";
}

Trajectory trajectory_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema_error, std::string("invalid trajectory JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "trajectory" || !j.contains("states")) {
    fail(ErrorCode::schema_error, "not a trajectory file (missing format/states)");
  }
  Trajectory tr;
  for (const auto& s : j.at("states")) {
    tr.push_back({s.at("t").get<int>(),
                  {s.at("x").get<double>(), s.at("y").get<double>()},
                  s.at("orientation").get<double>(),
                  s.at("velocity").get<double>(),
                  s.at("acceleration").get<double>()});
  }
  return tr;
}

/// Loads whichever strategy kind the JSON file declares and wraps it as a
/// controller. The storage keeps the strategy alive.
struct LoadedController {
  std::unique_ptr<PermissiveStrategy> permissive;
  std::unique_ptr<QTreeStrategy> qtree;
  std::unique_ptr<DecisionTree> dtree;
  std::unique_ptr<Controller> controller;
};

LoadedController load_controller(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::schema_error, std::string("invalid strategy JSON: ") + e.what());
  }
  const std::string format = j.is_object() ? j.value("format", "") : "";
  LoadedController out;
  if (format == "permissive-strategy") {
    out.permissive = std::make_unique<PermissiveStrategy>(load_permissive(text));
    out.controller = std::make_unique<PermissiveController>(*out.permissive);
  } else if (format == "qtree-strategy") {
    out.qtree = std::make_unique<QTreeStrategy>(load_strategy(text));
    out.controller = std::make_unique<GreedyController>(*out.qtree);
  } else if (format == "decision-tree") {
    out.dtree = std::make_unique<DecisionTree>(load_decision_tree(text));
    out.controller = std::make_unique<TreeController>(*out.dtree);
  } else {
    fail(ErrorCode::schema_error, "unknown strategy format '" + format + "' in " + path);
  }
  return out;
}

int cmd_parse(const std::string& path) {
  Scenario sc = load_scenario(path);
  const auto diagnostics = validate_scenario(sc);
  for (const auto& d : diagnostics) {
    std::cerr << "diagnostic (id " << d.entity_id << "): " << d.message << "\n";
  }
  if (!diagnostics.empty()) return kExitFails;
  std::cout << path << ": " << sc.lanelets.size() << " lanelets, " << sc.obstacles.size()
            << " obstacles, " << sc.planning_problems.size() << " planning problems\n";
  return kExitOk;
}

int cmd_synth(const std::string& path, const CommonOptions& common, const std::string& out_path) {
  const ToolConfig cfg = common.resolve();
  const Scenario sc = load_scenario(path);
  const GridSpec grid = cfg.make_grid(sc);
  const GameGraph game = build_game(sc, grid, cfg.dynamics, cfg.mode, cfg.ego);
  const SolveResult solved = solve_safety(game);
  write_file(out_path, save_permissive(solved.strategy));
  std::cout << "winning cells: " << solved.strategy.allowed.size() << " of " << game.states.size()
            << " explored (" << solved.sweeps << " sweeps)\n";
  std::cout << "strategy written to " << out_path << "\n";
  return kExitOk;
}

int cmd_learn(const std::string& path, const CommonOptions& common,
              const std::string& shield_path, const std::string& out_path,
              const std::string& log_path) {
  const ToolConfig cfg = common.resolve();
  const LearnConfig learn_cfg = cfg.make_learn_config();
  if (learn_cfg.episodes <= 0) {
    fail(ErrorCode::config_error, "learn.episodes must be positive");
  }
  const Scenario sc = load_scenario(path);

  std::unique_ptr<PermissiveStrategy> shield_strategy;
  if (!shield_path.empty()) {
    shield_strategy = std::make_unique<PermissiveStrategy>(load_permissive(read_file(shield_path)));
  }
  const GridSpec grid = shield_strategy ? shield_strategy->grid : cfg.make_grid(sc);

  std::unique_ptr<std::ofstream> log;
  if (!log_path.empty()) {
    log = std::make_unique<std::ofstream>(log_path, std::ios::binary);
    if (!*log) fail(ErrorCode::io_error, "cannot write " + log_path);
  }
  const LearnResult result =
      learn(sc, learn_cfg, grid, cfg.dynamics, cfg.ego, shield_strategy.get(), log.get());
  const QTreeStrategy qs = qtable_to_qtrees(result.table, grid);
  write_file(out_path, save_strategy(qs));
  std::cout << "episodes: " << learn_cfg.episodes << ", transitions: " << result.transitions
            << ", violations: " << result.violations << ", goal episodes: "
            << result.goal_episodes << "\n";
  std::cout << "strategy written to " << out_path << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& path, const CommonOptions& common, const std::string& query,
               const std::string& strategy_path, const std::string& trace_path) {
  if (query != "safe" && query != "goal" && query != "exists") {
    std::cerr << "error: unknown query '" << query << "' (expected safe|goal|exists)\n";
    return kExitUsage;
  }
  const ToolConfig cfg = common.resolve();
  const Scenario sc = load_scenario(path);

  Verdict verdict;
  if (query == "exists") {
    verdict = check_exists_safe(sc, cfg.dynamics, cfg.ego, cfg.make_grid(sc));
  } else {
    if (strategy_path.empty()) {
      std::cerr << "error: --strategy is required for query '" << query << "'\n";
      return kExitUsage;
    }
    const LoadedController loaded = load_controller(strategy_path);
    const int horizon = loaded.permissive ? loaded.permissive->grid.horizon : cfg.grid_horizon;
    verdict = query == "safe"
                  ? check_safety_under(sc, *loaded.controller, cfg.dynamics, cfg.ego, horizon)
                  : check_goal_under(sc, *loaded.controller, cfg.dynamics, cfg.ego, horizon);
  }

  std::cout << "query " << query << ": " << (verdict.holds ? "holds" : "fails") << " ("
            << verdict.states_explored << " states explored)\n";
  if (!verdict.holds && verdict.counterexample && !trace_path.empty()) {
    write_file(trace_path, trace_to_json_lines(*verdict.counterexample));
    std::cout << "counterexample written to " << trace_path << "\n";
  }
  return verdict.holds ? kExitOk : kExitFails;
}

int cmd_simulate(const std::string& path, const CommonOptions& common,
                 const std::string& strategy_path, uint64_t seed, int horizon_flag,
                 const std::string& out_path, const std::string& inject_path) {
  const ToolConfig cfg = common.resolve();
  const Scenario sc = load_scenario(path);
  const LoadedController loaded = load_controller(strategy_path);
  int horizon = horizon_flag;
  if (horizon <= 0) {
    horizon = loaded.permissive ? loaded.permissive->grid.horizon : cfg.grid_horizon;
  }
  const Trajectory tr = simulate(sc, *loaded.controller, cfg.dynamics, seed, horizon);
  write_file(out_path, trajectory_to_json(tr, sc.time_step_size));
  std::cout << tr.size() << " states written to " << out_path << "\n";
  if (!inject_path.empty()) {
    const Scenario injected =
        inject_trajectory(sc, tr, RectangleShape{cfg.ego.length, cfg.ego.width});
    write_file(inject_path, serialize_scenario(injected));
    std::cout << "scenario with injected trajectory written to " << inject_path << "\n";
  }
  return kExitOk;
}

int cmd_render(const std::string& path, const CommonOptions& common,
               const std::string& trajectory_path, const std::string& out_dir) {
  const ToolConfig cfg = common.resolve();
  const Scenario sc = load_scenario(path);
  Trajectory tr;
  const Trajectory* tr_ptr = nullptr;
  if (!trajectory_path.empty()) {
    tr = trajectory_from_json(read_file(trajectory_path));
    tr_ptr = &tr;
  }
  fs::create_directories(out_dir);
  const int frames = render_frame_count(sc, tr_ptr);
  std::vector<std::string> names;
  for (int t = 0; t < frames; ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04d.svg", t);
    write_file((fs::path(out_dir) / name).string(), render_frame(sc, tr_ptr, t, cfg.ego));
    names.emplace_back(name);
  }
  write_file((fs::path(out_dir) / "manifest.json").string(),
             render_manifest(names, sc.time_step_size));
  std::cout << frames << " frames written to " << out_dir << "\n";
  return kExitOk;
}

int cmd_to_uppaal(const std::string& path, const CommonOptions& common,
                  const std::string& out_dir) {
  const ToolConfig cfg = common.resolve();
  const Scenario sc = load_scenario(path);
  const GridSpec grid = cfg.make_grid(sc);
  const ModelDocument doc = generate_model(sc, cfg.dynamics, grid, cfg.ego);
  fs::create_directories(out_dir);
  const std::string stem = fs::path(path).stem().string();
  const std::string model_path = (fs::path(out_dir) / (stem + ".xml")).string();
  const std::string query_path = (fs::path(out_dir) / (stem + ".q")).string();
  write_file(model_path, doc.to_xml());
  write_file(query_path, generate_queries(sc, grid.horizon));
  std::cout << "model written to " << model_path << "\n";
  std::cout << "queries written to " << query_path << "\n";
  return kExitOk;
}

int cmd_dtree(const std::string& strategy_path, const std::string& out_path,
              const std::string& dot_path) {
  const QTreeStrategy qs = load_strategy(read_file(strategy_path));
  const DecisionTree dt = qtrees_to_decision_tree(qs);
  write_file(out_path, save_decision_tree(dt));
  std::cout << "decision tree with " << dt.tree.leaf_count() << " leaves written to " << out_path
            << "\n";
  if (!dot_path.empty()) {
    write_file(dot_path, export_dot(dt));
    std::cout << "graph description written to " << dot_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario toolkit: safety-game synthesis, shielded learning, verification,"
               " simulation and rendering for road scenarios"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, strategy_path, shield_path, trace_path, log_path;
  std::string query, trajectory_path, out_dir, dot_path, inject_path;
  uint64_t seed = 1;
  int horizon = 0;
  CommonOptions common;

  auto* parse_cmd = app.add_subcommand("parse", "Parse and validate a scenario file");
  parse_cmd->add_option("scenario", scenario_path, "scenario XML file")->required();

  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a permissive safe strategy");
  synth_cmd->add_option("scenario", scenario_path)->required();
  synth_cmd->add_option("-o,--out", out_path, "output strategy JSON")->required();
  common.attach(synth_cmd);

  auto* learn_cmd = app.add_subcommand("learn", "Q-learning, optionally under a safety shield");
  learn_cmd->add_option("scenario", scenario_path)->required();
  learn_cmd->add_option("-o,--out", out_path, "output Q-tree strategy JSON")->required();
  learn_cmd->add_option("--shield", shield_path, "permissive strategy JSON used as shield");
  learn_cmd->add_option("--log", log_path, "line-delimited JSON transition log");
  common.attach(learn_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "Check safe|goal|exists for a strategy");
  verify_cmd->add_option("scenario", scenario_path)->required();
  verify_cmd->add_option("--query", query, "safe, goal or exists")->required();
  verify_cmd->add_option("--strategy", strategy_path, "strategy JSON file");
  verify_cmd->add_option("--trace", trace_path, "counterexample output (JSON lines)");
  common.attach(verify_cmd);

  auto* sim_cmd = app.add_subcommand("simulate", "Roll out a controller and record a trajectory");
  sim_cmd->add_option("scenario", scenario_path)->required();
  sim_cmd->add_option("--strategy", strategy_path)->required();
  sim_cmd->add_option("--seed", seed, "random seed for obstacle choices");
  sim_cmd->add_option("--horizon", horizon, "steps to simulate (default: strategy horizon)");
  sim_cmd->add_option("-o,--out", out_path, "trajectory JSON output")->required();
  sim_cmd->add_option("--inject", inject_path, "write scenario with the trajectory injected");
  common.attach(sim_cmd);

  auto* render_cmd = app.add_subcommand("render", "Write one SVG frame per time step");
  render_cmd->add_option("scenario", scenario_path)->required();
  render_cmd->add_option("--trajectory", trajectory_path, "trajectory JSON to overlay");
  render_cmd->add_option("--out", out_dir, "output directory")->required();
  common.attach(render_cmd);

  auto* uppaal_cmd = app.add_subcommand("to-uppaal", "Emit UPPAAL model and query files");
  uppaal_cmd->add_option("scenario", scenario_path)->required();
  uppaal_cmd->add_option("--out-dir", out_dir, "output directory")->required();
  common.attach(uppaal_cmd);

  auto* dtree_cmd = app.add_subcommand("dtree", "Compile a Q-tree strategy to a decision tree");
  dtree_cmd->add_option("--strategy", strategy_path, "Q-tree strategy JSON")->required();
  dtree_cmd->add_option("--out", out_path, "decision tree JSON output")->required();
  dtree_cmd->add_option("--dot", dot_path, "also write a graph description");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (parse_cmd->parsed()) return cmd_parse(scenario_path);
    if (synth_cmd->parsed()) return cmd_synth(scenario_path, common, out_path);
    if (learn_cmd->parsed()) {
      return cmd_learn(scenario_path, common, shield_path, out_path, log_path);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(scenario_path, common, query, strategy_path, trace_path);
    }
    if (sim_cmd->parsed()) {
      return cmd_simulate(scenario_path, common, strategy_path, seed, horizon, out_path,
                          inject_path);
    }
    if (render_cmd->parsed()) {
      return cmd_render(scenario_path, common, trajectory_path, out_dir);
    }
    if (uppaal_cmd->parsed()) return cmd_to_uppaal(scenario_path, common, out_dir);
    if (dtree_cmd->parsed()) return cmd_dtree(strategy_path, out_path, dot_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFails;
  }
  return kExitUsage;
}
