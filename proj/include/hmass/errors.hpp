#pragma once

#include <stdexcept>
#include <string>

namespace hmass {

/// Malformed or inconsistent input (bad dimension, degenerate segment,
/// unbalanced measures). The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical certificate failed (residual, duality gap, iteration cap).
/// The CLI maps this to exit code 1.
class ToleranceError : public std::runtime_error {
 public:
  explicit ToleranceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hmass
