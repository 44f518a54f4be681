#pragma once

#include <stdexcept>
#include <string>

namespace codev {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable streams/files.
struct IoError : Error {
  using Error::Error;
};

// Malformed input beyond tolerated limits.
struct FormatError : Error {
  using Error::Error;
};

// Structurally valid input that violates a dataset contract.
struct DataError : Error {
  using Error::Error;
};

// Analysis cannot proceed (empty eligible set, no feasible null pairs, ...).
struct InfeasibleError : Error {
  using Error::Error;
};

}  // namespace codev
