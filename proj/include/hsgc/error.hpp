#pragma once

#include <stdexcept>
#include <string>

namespace hsgc {

/// Base of every error thrown by the library. Messages are prefixed with the
/// module that raised them, e.g. "hsi_io: bad magic".
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class FormatError : public Error {
  using Error::Error;
};

class TruncationError : public Error {
  using Error::Error;
};

class DataError : public Error {
  using Error::Error;
};

class ParameterError : public Error {
  using Error::Error;
};

/// A matrix expected to be symmetric positive definite was not.
class SpdError : public Error {
  using Error::Error;
};

class ConfigError : public Error {
  using Error::Error;
};

}  // namespace hsgc
