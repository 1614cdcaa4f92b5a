#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace raddich {

/// Base class for every error raised by the library. `code()` is a stable
/// identifier used by the CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define RADDICH_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  };

RADDICH_DEFINE_ERROR(DomainError)
RADDICH_DEFINE_ERROR(NonDiagonalizable)
RADDICH_DEFINE_ERROR(BranchCut)
RADDICH_DEFINE_ERROR(QuadratureFailure)
RADDICH_DEFINE_ERROR(HypothesisViolation)
RADDICH_DEFINE_ERROR(BasisMismatch)
RADDICH_DEFINE_ERROR(BlowUp)
RADDICH_DEFINE_ERROR(HorizonTooShort)
RADDICH_DEFINE_ERROR(IllConditionedSplit)
RADDICH_DEFINE_ERROR(FitFailure)
RADDICH_DEFINE_ERROR(SingularSystem)
RADDICH_DEFINE_ERROR(ConfigError)

#undef RADDICH_DEFINE_ERROR

}  // namespace raddich
