#pragma once

#include <stdexcept>
#include <string>

namespace tilefuse {

// Bad command-line usage or an invalid configuration value.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, records, ids).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tilefuse
