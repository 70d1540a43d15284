#pragma once

#include <stdexcept>
#include <string>

namespace roadgame {

enum class ErrorCode {
  malformed_xml,
  schema_violation,
  invariant_violation,
  no_behaviour,
  grid_too_coarse,
  unrealizable,
  outside_winning_region,
  shield_empty,
  not_winning,
  schema_error,
  arity_mismatch,
  controller_undefined,
  unsupported_feature,
  io_error,
  config_error,
};

const char* to_string(ErrorCode code);

/// All library failures are reported as Error with a machine-checkable code.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace roadgame
