#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace srb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed files, out-of-range parameters, unknown names.
// The CLI maps this family to exit status 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class AdapterError : public Error {
 public:
  AdapterError(const std::string& what, std::vector<std::string> pending)
      : Error(what), pending_(std::move(pending)) {}
  explicit AdapterError(const std::string& what) : Error(what) {}

  // Request ids that never received a response.
  const std::vector<std::string>& pending() const { return pending_; }

 private:
  std::vector<std::string> pending_;
};

}  // namespace srb
