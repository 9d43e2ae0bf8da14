#pragma once

#include <stdexcept>
#include <string>

namespace passage {

enum class ErrorKind { Config, Domain, Range, Argument, Accuracy, Unsupported, StepSize, Horizon };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define PASSAGE_ERROR_TYPE(Name, Kind)                                             \
  class Name : public Error {                                                      \
   public:                                                                         \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {}       \
  };

PASSAGE_ERROR_TYPE(ConfigError, Config)
PASSAGE_ERROR_TYPE(DomainError, Domain)
PASSAGE_ERROR_TYPE(RangeError, Range)
PASSAGE_ERROR_TYPE(ArgumentError, Argument)
PASSAGE_ERROR_TYPE(AccuracyError, Accuracy)
PASSAGE_ERROR_TYPE(UnsupportedError, Unsupported)
PASSAGE_ERROR_TYPE(StepSizeError, StepSize)
PASSAGE_ERROR_TYPE(HorizonError, Horizon)

#undef PASSAGE_ERROR_TYPE

// 2 for configuration problems, 4 for Monte Carlo horizon bias, 3 for every
// other numerical failure.
inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Argument:
      return 2;
    case ErrorKind::Horizon:
      return 4;
    default:
      return 3;
  }
}

}  // namespace passage
