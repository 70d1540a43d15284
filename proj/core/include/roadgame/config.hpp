#pragma once

#include <optional>
#include <string>

#include "roadgame/dynamics.hpp"
#include "roadgame/learning.hpp"
#include "roadgame/safety_game.hpp"

namespace roadgame {

/// Tool configuration assembled from a key=value file plus overrides.
/// Documented keys live in docs/config.md.
struct ToolConfig {
  DynamicsParams dynamics;
  VehicleProfile ego;
  LearnConfig learn;

  int grid_xy_cells = 40;
  int grid_theta_cells = 8;
  int grid_v_cells = 8;
  int grid_horizon = 10;
  std::optional<double> grid_x_lo, grid_x_hi, grid_y_lo, grid_y_hi;
  AbstractionMode mode = AbstractionMode::corners;

  /// Grid from the scenario bounding box with any explicit bound overrides;
  /// learn.max_steps of 0 resolves to the grid horizon.
  GridSpec make_grid(const Scenario& sc) const;
  LearnConfig make_learn_config() const;
};

/// Applies one `section.key=value` entry. Throws Error(config_error) for
/// unknown keys or unparsable values.
void apply_config_entry(ToolConfig& cfg, const std::string& key, const std::string& value);

/// Parses key=value lines; '#' starts a comment, blank lines are ignored.
ToolConfig parse_config_text(const std::string& text);

}  // namespace roadgame
