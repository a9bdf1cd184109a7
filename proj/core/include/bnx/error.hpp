#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bnx {

enum class ErrorKind {
  structural,          // ordering violation, malformed tree, dangling reference
  arity,               // child array length differs from the domain size
  domain,              // value index outside its variable's domain
  manager,             // operands live in different managers
  mode,                // operation not defined for the diagram's mode
  capacity,            // brute-force or memory cap exceeded
  parse,               // malformed input text
  normalization,       // probability table does not sum to one
  undefined_posterior, // Pr(x) = 0
  range,               // parameter outside its admissible range
  sequencing,          // feature unknown or already processed
  argument,            // inconsistent arguments
  precondition,        // documented precondition does not hold
  polarity,            // instance has the wrong decision for the call
  unsupported,         // e.g. monotonicity over non-binary domains
  training,            // dataset cannot produce a classifier
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bnx
