#include "roadgame/errors.hpp"

namespace roadgame {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_xml: return "malformed_xml";
    case ErrorCode::schema_violation: return "schema_violation";
    case ErrorCode::invariant_violation: return "invariant_violation";
    case ErrorCode::no_behaviour: return "no_behaviour";
    case ErrorCode::grid_too_coarse: return "grid_too_coarse";
    case ErrorCode::unrealizable: return "unrealizable";
    case ErrorCode::outside_winning_region: return "outside_winning_region";
    case ErrorCode::shield_empty: return "shield_empty";
    case ErrorCode::not_winning: return "not_winning";
    case ErrorCode::schema_error: return "schema_error";
    case ErrorCode::arity_mismatch: return "arity_mismatch";
    case ErrorCode::controller_undefined: return "controller_undefined";
    case ErrorCode::unsupported_feature: return "unsupported_feature";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::config_error: return "config_error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace roadgame
