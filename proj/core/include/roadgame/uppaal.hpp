#pragma once

#include <string>
#include <vector>

#include "roadgame/dynamics.hpp"
#include "roadgame/safety_game.hpp"
#include "roadgame/scenario.hpp"

namespace roadgame {

/// UPPAAL 5 model emitted from a scenario: global C-like declarations, the
/// three behaviour templates, a system line and the query list.
struct ModelDocument {
  struct Template {
    std::string name;
    std::string declaration;
    std::string locations_xml;   // <location .../> elements, pre-rendered
    std::string transitions_xml; // <transition .../> elements, pre-rendered
    std::string init_ref;
  };

  std::string declarations;
  std::vector<Template> templates;  // CM, VD, AA
  std::string system_line;
  std::vector<std::string> queries;

  std::string to_xml() const;
};

/// Declarations encode lanelet bounds, obstacle shapes and trajectories, the
/// goal region and the drivability functions; CM carries the period clock,
/// AA the 9 controllable edges on channel `ego`, VD the dynamics ODE.
/// Throws Error(unsupported_feature) for reactive action sets other than
/// "default".
ModelDocument generate_model(const Scenario& sc, const DynamicsParams& p, const GridSpec& g,
                             const VehicleProfile& profile = {});

/// Exactly three lines: the existence check, the safety synthesis query and
/// the shielded optimization query with MAXT substituted.
std::string generate_queries(const Scenario& sc, int maxt = 10);

}  // namespace roadgame
