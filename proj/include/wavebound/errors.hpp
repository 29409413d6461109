#pragma once

#include <stdexcept>

namespace wavebound {

/// An iterative procedure did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wavebound
