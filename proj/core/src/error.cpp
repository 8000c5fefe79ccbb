#include "gmanova/error.hpp"

namespace gmanova {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::input: return "input error";
    case ErrorKind::config: return "config error";
    case ErrorKind::design: return "design error";
    case ErrorKind::no_balancing_solution: return "NoBalancingSolution";
    case ErrorKind::degenerate_group: return "degenerate group";
    case ErrorKind::estimator_undefined: return "estimator undefined";
    case ErrorKind::diagnostic_undefined: return "diagnostic undefined";
    case ErrorKind::internal: return "internal error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

Error::Error(ErrorKind kind, const std::string& message, std::size_t group)
    : std::runtime_error(std::string(to_string(kind)) + " (group " + std::to_string(group + 1) +
                         "): " + message),
      kind_(kind),
      group_(group),
      message_(message) {}

Error Error::with_context(const std::string& context) const {
  const std::string text = context + ": " + message_;
  return group_ ? Error(kind_, text, *group_) : Error(kind_, text);
}

}  // namespace gmanova
