#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace spgep {

enum class ErrorKind {
  InvalidInput,      // bad dimensions, non-finite data, contract violations
  ParseError,        // unreadable input files
  RankDeficient,     // matrix rank below what the operation needs
  NotPositiveDefinite,
  OverPenalized,     // penalty level wiped out the whole estimate
  DegenerateColumn,  // a column with no usable signal (near-zero norm)
  TuningFailure      // no usable score on the whole grid
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::ParseError: return "parse_error";
    case ErrorKind::RankDeficient: return "rank_deficient";
    case ErrorKind::NotPositiveDefinite: return "not_positive_definite";
    case ErrorKind::OverPenalized: return "over_penalized";
    case ErrorKind::DegenerateColumn: return "degenerate_column";
    case ErrorKind::TuningFailure: return "tuning_failure";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // Optional payloads, meaningful for specific kinds.
  int numerical_rank = -1;                                    // RankDeficient
  double lambda = std::numeric_limits<double>::quiet_NaN();   // OverPenalized

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace spgep
