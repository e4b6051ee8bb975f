#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmsz {

/// Bad arguments or preconditions the caller could have checked.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed bytes on disk or in a buffer.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The decompressed field violates |f - f_hat| <= xi at some vertex.
class ContractError : public InputError {
 public:
  ContractError(const std::string& what, std::size_t vertex)
      : InputError(what), vertex_(vertex) {}
  std::size_t vertex() const noexcept { return vertex_; }

 private:
  std::size_t vertex_;
};

/// Correction did not reach a distortion-free fixpoint.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::size_t iterations,
                   std::size_t remaining)
      : std::runtime_error(what), iterations_(iterations), remaining_(remaining) {}
  std::size_t iterations() const noexcept { return iterations_; }
  /// Distortions still present when the loop gave up.
  std::size_t remaining() const noexcept { return remaining_; }

 private:
  std::size_t iterations_;
  std::size_t remaining_;
};

/// Broken internal invariant (replica disagreement, non-monotone update).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pmsz
