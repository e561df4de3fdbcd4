#pragma once

#include <stdexcept>
#include <string>

namespace cflab {

// Base for every error the library raises on bad input or unmet preconditions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration, catalog or input file.  CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A requested precision is not backed by the available data.  CLI exit code 3.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// Unreadable, corrupted or incompatible checkpoint.  CLI exit code 4.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

// Mathematical precondition violated (division by zero, empty interval, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace cflab
