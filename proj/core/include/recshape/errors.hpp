#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace recshape {

// Sequence iteration produced a non-finite value. Divergence is a
// classification signal, so the first failing index is carried along.
class EvaluationOverflow : public std::runtime_error {
public:
  EvaluationOverflow(std::int64_t first_bad_index, const std::string& what)
      : std::runtime_error(what), index_(first_bad_index) {}
  std::int64_t first_bad_index() const noexcept { return index_; }

private:
  std::int64_t index_;
};

class RootFindingError : public std::runtime_error {
public:
  RootFindingError(double residual, const std::string& what)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

// No recurrence of the allowed order reproduces the samples at the
// requested tolerance.
class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Torus dimension or node budget exceeded in certified range search;
// callers fall back to the empirical path.
class TorusBudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A constructed recurrence failed its own verification pass.
class ConstructionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class JsonParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace recshape
