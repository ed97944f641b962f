#pragma once

#include <stdexcept>
#include <string>

namespace lhiem {

// Bad flags, unusable parameter combinations, contract violations.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, snapshots, tables).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Numerical failures at run time (non-convergence, separation, thin leaves).
class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace lhiem
