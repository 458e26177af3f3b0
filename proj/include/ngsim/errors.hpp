#pragma once

#include <stdexcept>
#include <string>

namespace ngsim {

/// Invalid numeric or structural argument to a generator, model or fit.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested graph cannot be built (e.g. no room for shortcuts, never connected).
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few usable points, or degenerate abscissae, in a power-law fit.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed experiment configuration or unknown key/preset.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ngsim
