#include "mcflab/error.hpp"

namespace mcflab {

Error::Error(std::string module, std::string op, std::string reason)
    : std::runtime_error(module + "::" + op + ": " + reason),
      module_(std::move(module)),
      op_(std::move(op)),
      reason_(std::move(reason)) {}

}  // namespace mcflab
