#include "roadgame/config.hpp"

#include <charconv>
#include <sstream>

namespace roadgame {

namespace {

double to_double(const std::string& value, const std::string& key) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    fail(ErrorCode::config_error, "invalid number '" + value + "' for key " + key);
  }
  return out;
}

int to_int(const std::string& value, const std::string& key) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    fail(ErrorCode::config_error, "invalid integer '" + value + "' for key " + key);
  }
  return out;
}

uint64_t to_u64(const std::string& value, const std::string& key) {
  uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    fail(ErrorCode::config_error, "invalid seed '" + value + "' for key " + key);
  }
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_entry(ToolConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "dynamics.accel") {
    cfg.dynamics.accel = to_double(value, key);
  } else if (key == "dynamics.yaw_rate") {
    cfg.dynamics.yaw_rate = to_double(value, key);
  } else if (key == "dynamics.v_max") {
    cfg.dynamics.v_max = to_double(value, key);
  } else if (key == "dynamics.period") {
    cfg.dynamics.period = to_double(value, key);
  } else if (key == "dynamics.substeps") {
    cfg.dynamics.substeps = to_int(value, key);
  } else if (key == "ego.length") {
    cfg.ego.length = to_double(value, key);
  } else if (key == "ego.width") {
    cfg.ego.width = to_double(value, key);
  } else if (key == "ego.margin") {
    cfg.ego.margin = to_double(value, key);
  } else if (key == "ego.circles") {
    cfg.ego.circles = to_int(value, key);
  } else if (key == "grid.xy_cells") {
    cfg.grid_xy_cells = to_int(value, key);
  } else if (key == "grid.theta_cells") {
    cfg.grid_theta_cells = to_int(value, key);
  } else if (key == "grid.v_cells") {
    cfg.grid_v_cells = to_int(value, key);
  } else if (key == "grid.horizon") {
    cfg.grid_horizon = to_int(value, key);
  } else if (key == "grid.x_lo") {
    cfg.grid_x_lo = to_double(value, key);
  } else if (key == "grid.x_hi") {
    cfg.grid_x_hi = to_double(value, key);
  } else if (key == "grid.y_lo") {
    cfg.grid_y_lo = to_double(value, key);
  } else if (key == "grid.y_hi") {
    cfg.grid_y_hi = to_double(value, key);
  } else if (key == "grid.mode") {
    if (value == "center") {
      cfg.mode = AbstractionMode::center;
    } else if (value == "corners") {
      cfg.mode = AbstractionMode::corners;
    } else {
      fail(ErrorCode::config_error, "grid.mode must be center or corners, got '" + value + "'");
    }
  } else if (key == "learn.episodes") {
    cfg.learn.episodes = to_int(value, key);
  } else if (key == "learn.alpha") {
    cfg.learn.alpha = to_double(value, key);
  } else if (key == "learn.gamma") {
    cfg.learn.gamma = to_double(value, key);
  } else if (key == "learn.epsilon_start") {
    cfg.learn.epsilon_start = to_double(value, key);
  } else if (key == "learn.epsilon_end") {
    cfg.learn.epsilon_end = to_double(value, key);
  } else if (key == "learn.max_steps") {
    cfg.learn.max_steps = to_int(value, key);
  } else if (key == "learn.seed") {
    cfg.learn.seed = to_u64(value, key);
  } else if (key == "learn.reward_goal") {
    cfg.learn.rewards.goal = to_double(value, key);
  } else if (key == "learn.reward_violation") {
    cfg.learn.rewards.violation = to_double(value, key);
  } else if (key == "learn.reward_step") {
    cfg.learn.rewards.step = to_double(value, key);
  } else if (key == "learn.reward_accel_cost") {
    cfg.learn.rewards.accel_cost = to_double(value, key);
  } else {
    fail(ErrorCode::config_error, "unknown configuration key '" + key + "'");
  }
}

ToolConfig parse_config_text(const std::string& text) {
  ToolConfig cfg;
  cfg.learn.max_steps = 0;  // resolve to grid horizon later
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::config_error,
           "expected key=value on line " + std::to_string(line_no));
    }
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

GridSpec ToolConfig::make_grid(const Scenario& sc) const {
  GridSpec g = default_grid(sc, dynamics, ego, grid_xy_cells, grid_theta_cells, grid_v_cells,
                            grid_horizon);
  if (grid_x_lo) g.x.lo = *grid_x_lo;
  if (grid_x_hi) g.x.hi = *grid_x_hi;
  if (grid_y_lo) g.y.lo = *grid_y_lo;
  if (grid_y_hi) g.y.hi = *grid_y_hi;
  g.v.hi = dynamics.v_max;
  return g;
}

LearnConfig ToolConfig::make_learn_config() const {
  LearnConfig out = learn;
  if (out.max_steps <= 0) out.max_steps = grid_horizon;
  return out;
}

}  // namespace roadgame
