#ifndef CAN_ERRORS_HPP_
#define CAN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace can {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejected input: dimension mismatches, constraint violations, parse errors.
// The CLI maps this to exit code 1.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Internal numerical failure: degenerate rows, sampling exhaustion,
// undefined gains. The CLI maps this to exit code 2.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace can

#endif  // CAN_ERRORS_HPP_
