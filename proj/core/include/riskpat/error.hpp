#pragma once

#include <stdexcept>
#include <string>

namespace riskpat {

// Domain failure: bad input data, unknown identifiers, corrupt files.
// The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lookup of an identifier (fips, pattern id) that does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace riskpat
