#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

// Violated preconditions on shapes and sizes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Iterative solver hit its cap before reaching the requested gap.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double gap)
      : std::runtime_error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

// Geometric input that the requested operation cannot handle
// (degenerate bodies, non-manifold meshes, unsupported dimensions).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace finsler
