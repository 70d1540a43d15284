#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "roadgame/dynamics.hpp"
#include "roadgame/geometry.hpp"
#include "roadgame/scenario.hpp"

namespace roadgame {

/// Ego occupancy description used by the drivability predicates.
struct VehicleProfile {
  double length = 4.0;
  double width = 2.0;
  double margin = 0.5;  // safety distance for collide()
  int circles = 0;      // 0 = derive from length/width
};

struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  int cells = 1;
};

/// Time-indexed grid over (x, y, theta, v). Cells are half-open boxes
/// [b_i, b_{i+1}) with inner boundaries b_i = lo + i*(hi-lo)/cells; the last
/// cell is closed at hi. A value exactly on an inner boundary belongs to the
/// higher cell.
struct GridSpec {
  GridAxis x;
  GridAxis y;
  GridAxis theta{-M_PI, M_PI, 8};
  GridAxis v{0.0, 15.0, 8};
  int horizon = 10;  // MAXT, in decision steps
};

/// Inner boundary value; i in 0..cells gives lo, b_1..b_{cells-1}, hi.
double axis_boundary(const GridAxis& axis, int i);

/// Cell index for a value, -1 when outside [lo, hi].
int axis_index(const GridAxis& axis, double value);

double axis_center(const GridAxis& axis, int i);

/// Grid sized from the lanelet bounding box, inflated so one period of motion
/// from any on-road pose stays inside.
GridSpec default_grid(const Scenario& sc, const DynamicsParams& p, const VehicleProfile& profile,
                      int xy_cells = 40, int theta_cells = 8, int v_cells = 8, int horizon = 10);

struct AbstractState {
  int ix = 0;
  int iy = 0;
  int itheta = 0;
  int iv = 0;
  int t = 0;
  friend bool operator==(const AbstractState&, const AbstractState&) = default;
};

uint64_t state_key(const GridSpec& g, const AbstractState& s);

/// Abstract state containing a concrete ego state, or throws
/// Error(grid_too_coarse) when the state leaves the gridded region.
AbstractState abstract_of(const GridSpec& g, const EgoState& s);

EgoState cell_center_state(const GridSpec& g, const AbstractState& s);

enum class AbstractionMode { center, corners };

/// Finite ego-environment game over grid cells. Successor sets are per
/// (state, action); a state whose successor lists are all empty is terminal
/// (game over, every action allowed if the state is safe). For non-terminal
/// states an action with an empty successor list is treated as unavailable.
struct GameGraph {
  GridSpec grid;
  int n_actions = 9;
  std::vector<AbstractState> states;
  std::vector<uint8_t> bad;
  std::vector<uint8_t> goal;
  std::vector<std::vector<std::vector<int>>> successors;  // [state][action] -> state ids
  int initial_state = -1;
  std::unordered_map<uint64_t, int> index;

  int add_state(const AbstractState& s, bool is_bad, bool is_goal);
  void add_edge(int state, int action, int succ);
  bool terminal(int state) const;
};

/// Builds the reachable game from the first planning problem's initial state.
/// center mode steps cell centers; corners mode steps all 2^4 cell corners
/// plus the center and is the conservative default for synthesis. Reactive
/// obstacles are folded into per-step occupancy envelopes covering every
/// choice sequence.
GameGraph build_game(const Scenario& sc, const GridSpec& g, const DynamicsParams& p,
                     AbstractionMode mode, const VehicleProfile& profile);

/// Permissive safe strategy: every kept action leads only to winning states.
struct PermissiveStrategy {
  GridSpec grid;
  int n_actions = 9;
  std::map<uint64_t, uint16_t> allowed;  // winning state key -> action bitmask

  bool winning(const AbstractState& s) const;
  uint16_t allowed_mask(const AbstractState& s) const;
};

struct SolveResult {
  PermissiveStrategy strategy;
  std::vector<uint8_t> winning;        // per game state
  std::vector<uint16_t> allowed;       // per game state, 0 when losing
  int sweeps = 0;
};

/// Greatest fixpoint: W0 = non-bad states, W_{k+1} keeps states with an
/// action whose successors all stay in W_k. Throws Error(unrealizable) when
/// the game has an initial state and it is not winning.
SolveResult solve_safety(const GameGraph& gg);

/// Allowed actions (ascending indices) for the cell containing s at step s.t.
/// Throws Error(grid_too_coarse) outside the grid and
/// Error(outside_winning_region) for losing cells.
std::vector<int> shield(const PermissiveStrategy& ps, const EgoState& s);

/// JSON round-trip (documented in docs/strategy-json.md).
std::string save_permissive(const PermissiveStrategy& ps);
PermissiveStrategy load_permissive(const std::string& json_text);

}  // namespace roadgame
