#pragma once

#include <stdexcept>
#include <string>

namespace naqbc {

// Invalid configuration or precondition violation caught before any work starts.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension mismatch between an input and what a model/operation expects.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric divergence (NaN/Inf) during an iterative procedure.
// `where` carries the epoch or step index at which it was detected.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& msg, long where_index)
      : std::runtime_error(msg), where(where_index) {}
  long where;
};

// A registry problem whose oracle needs an external simulator we do not ship.
class UnsupportedOracleError : public std::runtime_error {
 public:
  explicit UnsupportedOracleError(const std::string& msg) : std::runtime_error(msg) {}
};

// API misuse (e.g. querying results of a run that is still in progress).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// No efficiency ratio can be formed: one side has no run that reached the
// target. Carries how many runs were excluded on each side.
class UndefinedEtaError : public std::runtime_error {
 public:
  UndefinedEtaError(const std::string& msg, long al_excluded_count, long rand_excluded_count)
      : std::runtime_error(msg),
        al_excluded(al_excluded_count),
        rand_excluded(rand_excluded_count) {}
  long al_excluded;
  long rand_excluded;
};

}  // namespace naqbc
