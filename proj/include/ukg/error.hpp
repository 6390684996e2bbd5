#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ukg {

enum class ErrorCode {
  usage,
  domain_mismatch,
  invariant_violation,
  unknown_id,
  unknown_node,
  unknown_parent,
  unknown_source,
  unknown_predicate,
  duplicate,
  second_root,
  invalid_taxonomy,
  not_an_ancestor,
  credibility_out_of_range,
  parse_error,
  version_mismatch,
  integrity_violation,
  io_error,
  non_termination,
  verdict_undetermined,
  already_applied,
  version_conflict,
};

std::string_view to_string(ErrorCode code);

// Every library failure surfaces as this exception; callers map the code to
// exit statuses or HTTP responses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ukg
