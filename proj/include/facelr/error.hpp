#pragma once

#include <stdexcept>
#include <string>

namespace facelr {

// Every pipeline failure surfaces as facelr::Error; the CLI tags it with the
// failing stage and exits nonzero.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace facelr
