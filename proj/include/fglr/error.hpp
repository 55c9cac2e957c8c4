#pragma once

#include <stdexcept>
#include <string>

namespace fglr {

enum class ErrorKind {
  InvalidArgument,
  Io,
  Parse,
  Service,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fglr
