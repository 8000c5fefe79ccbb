#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace gmanova {

enum class ErrorKind {
  input,                  // malformed or non-finite input data
  config,                 // invalid experiment / generator configuration
  design,                 // rank or dimension violation in the design matrices
  no_balancing_solution,  // the Hadamard system for the balancing weights has no solution
  degenerate_group,       // a group has too few observations for its within-group design
  estimator_undefined,    // tau_3 vanishes or N_i - k_i < 2
  diagnostic_undefined,   // every off-diagonal weight is zero
  internal,               // an invariant that should hold by construction did not
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  /// `group` is zero-based; the message reports it one-based.
  Error(ErrorKind kind, const std::string& message, std::size_t group);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> group() const noexcept { return group_; }
  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }
  /// Same kind and group, message prefixed with `context: `.
  Error with_context(const std::string& context) const;

 private:
  ErrorKind kind_;
  std::optional<std::size_t> group_;
  std::string message_;
};

}  // namespace gmanova
