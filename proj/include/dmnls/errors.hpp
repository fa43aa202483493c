#pragma once

#include <stdexcept>
#include <string>

namespace dmnls {

/// Invalid run configuration (bad JSON, out-of-range values, unknown keys).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A trajectory left the admissible regime: non-finite values or the H^1
/// ceiling was exceeded. Carries the abort time.
class BlowupError : public std::runtime_error {
public:
  BlowupError(const std::string& what, double t)
      : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

private:
  double time_;
};

}  // namespace dmnls
