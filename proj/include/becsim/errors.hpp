#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace becsim {

// Base class for everything the engine throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unknown/missing/invalid config keys, invalid model
// parameters. Carries the full violation list so a run can report every
// problem at once. CLI exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  explicit ConfigError(const std::string& single)
      : ConfigError(std::vector<std::string>{single}) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& e : v) {
      if (!s.empty()) s += "\n";
      s += e;
    }
    return s;
  }
  std::vector<std::string> violations_;
};

// Numerical failure: root solver out of iterations, integrator step-size
// collapse, positivity budget exceeded, overflow guards. CLI exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

// The model itself is degenerate: empty spectrum, zero-rate break inside the
// detailed-balance chain, malformed tables. CLI exit code 4.
class StructuralError : public Error {
 public:
  using Error::Error;
};

}  // namespace becsim
