#pragma once

#include <stdexcept>

namespace betatails {

// Precondition and configuration problems are reported with std::invalid_argument.
// NumericalError is for valid input on which a computation has no meaningful answer,
// e.g. a tail fit left with too few usable points.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace betatails
