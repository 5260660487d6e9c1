#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace klfactor {

// Inputs violated a declared invariant or precondition (bad weights, model
// mismatch, malformed files). The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// A computation failed on otherwise well-formed inputs (indefinite pivot,
// overflow, domain violation discovered mid-solve). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace klfactor
