#pragma once

#include <stdexcept>
#include <string>

namespace repmon {

// Invalid configuration: bad parameter ranges, impossible group sets,
// inconsistent reporting assumptions. Exit code 2 at the CLI.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data: CSV rows, snapshots, report values
// that violate the covariate schema. Exit code 3 at the CLI.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A report or assignment names a covariate or category the schema does not
// declare.
class SchemaError : public DataError {
 public:
  explicit SchemaError(const std::string& what) : DataError(what) {}
};

// Operation applied in the wrong phase, e.g. ingesting into a stopped
// monitor. Exit code 4 at the CLI.
class StateError : public std::runtime_error {
 public:
  explicit StateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace repmon
