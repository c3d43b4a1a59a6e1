#pragma once

#include <stdexcept>
#include <string>

namespace statreg {

/// Malformed or missing experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure could not produce a meaningful result.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A parameter-choice rule was applied to a noise model it is not defined for.
class UnsupportedNoiseError : public NumericalError {
 public:
  explicit UnsupportedNoiseError(const std::string& what) : NumericalError(what) {}
};

}  // namespace statreg
