#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roadgame/safety_game.hpp"
#include "roadgame/scenario.hpp"
#include "roadgame/verify.hpp"

namespace roadgame {

struct RenderOptions {
  int width = 800;
  int height = 600;
  double padding = 5.0;  // meters around the world bounding box
};

/// Maps world coordinates into the SVG pixel frame (y axis flipped).
struct ViewTransform {
  double scale = 1.0;
  double offset_x = 0.0;
  double offset_y = 0.0;
  double px(double x) const { return offset_x + scale * x; }
  double py(double y) const { return offset_y - scale * y; }
};

ViewTransform view_transform(const Scenario& sc, const Trajectory* tr,
                             const RenderOptions& opts);

/// One SVG frame for time step t: lanelets, obstacles at their step-t poses,
/// the goal region, and the ego box at tr[t] when a trajectory is given.
std::string render_frame(const Scenario& sc, const Trajectory* tr, int t,
                         const VehicleProfile& profile, const RenderOptions& opts = {});

/// Number of frames needed to show all obstacle trajectories and the ego
/// trajectory (at least 1).
int render_frame_count(const Scenario& sc, const Trajectory* tr);

/// JSON manifest listing the frame files and the frame period in seconds.
std::string render_manifest(const std::vector<std::string>& frames, double frame_time);

}  // namespace roadgame
