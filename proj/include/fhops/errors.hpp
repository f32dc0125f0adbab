#pragma once

#include <stdexcept>
#include <string>

namespace fhops {

// Violation of a documented operation contract (bad argument, missing data,
// unsupported input class). The CLI maps this to exit code 2, the C API to
// FHOPS_E_PRECONDITION. Anything else that goes wrong is a plain
// std::runtime_error (exit code 1 / FHOPS_E_INTERNAL).
class precondition_error : public std::invalid_argument {
 public:
  explicit precondition_error(const std::string& what_arg)
      : std::invalid_argument(what_arg) {}
};

inline void require_pre(bool ok, const std::string& msg) {
  if (!ok) throw precondition_error(msg);
}

}  // namespace fhops
