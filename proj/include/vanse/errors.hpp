#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vanse {

/// Invalid parameters: unsupported dimension, tau <= 1/2, non-positive void
/// fraction at load, malformed input files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad command-line or API usage (unknown case id, mismatched shapes, ...).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The simulation produced a non-finite or non-positive zeroth moment.
class NumericalBreakdown : public std::runtime_error {
 public:
  NumericalBreakdown(const std::string& what, long step, std::size_t cell)
      : std::runtime_error(what + " (step " + std::to_string(step) + ", cell " +
                           std::to_string(cell) + ")"),
        step_(step),
        cell_(cell) {}

  long step() const { return step_; }
  std::size_t cell() const { return cell_; }

 private:
  long step_;
  std::size_t cell_;
};

}  // namespace vanse
