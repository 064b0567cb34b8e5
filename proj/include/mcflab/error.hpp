#pragma once

#include <stdexcept>
#include <string>

namespace mcflab {

// Base for all rejections raised by the library. Carries the owning module and
// operation so the CLI can emit structured error records.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string op, std::string reason);
  const std::string& module() const { return module_; }
  const std::string& op() const { return op_; }
  const std::string& reason() const { return reason_; }
  virtual int exit_code() const { return 2; }
  virtual const char* kind() const { return "error"; }

 private:
  std::string module_, op_, reason_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 2; }
  const char* kind() const override { return "precondition"; }
};

class CoverageError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 4; }
  const char* kind() const override { return "coverage"; }
};

}  // namespace mcflab
