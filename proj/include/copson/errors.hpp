#pragma once

#include <stdexcept>
#include <string>

namespace copson {

/// Malformed or unreadable input data (sequence files, explicit lists).
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method stopped without meeting its tolerance.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter violations use std::invalid_argument; evaluations outside a
// function's domain use std::domain_error.

}  // namespace copson
