#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violations: bad windows, cutoffs at or above Nyquist, rate mismatches.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Physically or numerically meaningless configuration (e.g. feedback level >= 1).
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// The excess-phase root solver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::size_t sample_index)
      : Error(what), sample_index_(sample_index) {}
  std::size_t sample_index() const noexcept { return sample_index_; }

 private:
  std::size_t sample_index_;
};

// A recording with no usable noise floor or no spectral content.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace smi
