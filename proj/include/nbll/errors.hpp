#pragma once

#include <stdexcept>
#include <string>

namespace nbll {

/// Malformed or inconsistent topology input.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal invariant violated (double release, occupancy above capacity...).
/// Always indicates a bug in the caller or the engine, never bad user input.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nbll
