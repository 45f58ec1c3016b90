#pragma once

#include <stdexcept>
#include <string>

namespace covrank {

/// Failure domain, mapped onto distinct process exit codes by the CLI.
enum class ErrorKind {
  config = 2,
  data = 3,
  training = 4,
  evaluation = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline int exit_code(ErrorKind kind) { return static_cast<int>(kind); }

}  // namespace covrank
