#pragma once

#include <stdexcept>
#include <string>

namespace tfx {

enum class Errc {
  not_a_limit,
  not_a_successor,
  space_mismatch,
  bad_factor,
  limit_divergence,
  budget_exceeded,
  stage_not_recorded,
  signal_undefined,
  inner_divergence,
  too_large,
  no_fixpoint,
  unknown_label,
  parse_error,
  validation_error,
  empty_trace,
};

constexpr const char* errc_name(Errc c) {
  switch (c) {
    case Errc::not_a_limit: return "NotALimit";
    case Errc::not_a_successor: return "NotASuccessor";
    case Errc::space_mismatch: return "SpaceMismatch";
    case Errc::bad_factor: return "BadFactor";
    case Errc::limit_divergence: return "LimitDivergence";
    case Errc::budget_exceeded: return "BudgetExceeded";
    case Errc::stage_not_recorded: return "StageNotRecorded";
    case Errc::signal_undefined: return "SignalUndefined";
    case Errc::inner_divergence: return "InnerDivergence";
    case Errc::too_large: return "TooLarge";
    case Errc::no_fixpoint: return "NoFixpoint";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::parse_error: return "ParseError";
    case Errc::validation_error: return "ValidationError";
    case Errc::empty_trace: return "EmptyTrace";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace tfx
