#pragma once

#include <stdexcept>
#include <string>

namespace bileg {

/// Broad failure class; maps onto CLI exit codes 2 and 3.
enum class ErrorKind {
  Input,        ///< malformed or out-of-range input
  Precondition  ///< a mathematical precondition of the operation fails
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] inline void fail_input(const std::string& code, const std::string& message) {
  throw Error(ErrorKind::Input, code, message);
}

[[noreturn]] inline void fail_math(const std::string& code, const std::string& message) {
  throw Error(ErrorKind::Precondition, code, message);
}

}  // namespace bileg
