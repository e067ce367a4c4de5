#pragma once

#include <stdexcept>
#include <string>

namespace faultid {

/// Operand shapes do not conform.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A signal has fewer samples than an operation needs.
class LengthError : public std::length_error {
 public:
  LengthError(const std::string& what, long required, long available)
      : std::length_error(what + ": requires " + std::to_string(required) +
                          " samples, " + std::to_string(available) +
                          " available"),
        required_(required),
        available_(available) {}

  long required() const { return required_; }
  long available() const { return available_; }

 private:
  long required_;
  long available_;
};

/// A computation ran but its numerical outcome is unusable.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data does not excite the system (rank-deficient input Hankel).
class ExcitationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Every singular value is negligible; nothing can be inferred.
class DegenerateDataError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Wraps an error with the pipeline stage that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what, bool numerical)
      : std::runtime_error(stage + ": " + what),
        stage_(std::move(stage)),
        numerical_(numerical) {}

  const std::string& stage() const { return stage_; }
  bool numerical() const { return numerical_; }

 private:
  std::string stage_;
  bool numerical_;
};

}  // namespace faultid
