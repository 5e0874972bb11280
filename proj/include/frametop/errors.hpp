#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace frametop {

// Domain errors carry a stable code string so the CLI can emit machine-readable
// error objects. Anything else reaching the CLI counts as an internal error.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define FRAMETOP_DEFINE_ERROR(Name)                                     \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(#Name, what) {}      \
  }

FRAMETOP_DEFINE_ERROR(DimensionMismatch);
FRAMETOP_DEFINE_ERROR(FrameInvariantViolated);
FRAMETOP_DEFINE_ERROR(NotAProjection);
FRAMETOP_DEFINE_ERROR(NotHermitian);
FRAMETOP_DEFINE_ERROR(TraceNotIntegral);
FRAMETOP_DEFINE_ERROR(EigenvalueTie);
FRAMETOP_DEFINE_ERROR(BadPermutation);
FRAMETOP_DEFINE_ERROR(NotInPolytope);
FRAMETOP_DEFINE_ERROR(TooLarge);
FRAMETOP_DEFINE_ERROR(BadDimensions);
FRAMETOP_DEFINE_ERROR(NumericalStall);
FRAMETOP_DEFINE_ERROR(BadComposition);
FRAMETOP_DEFINE_ERROR(InfeasibleDescriptor);
FRAMETOP_DEFINE_ERROR(AmbiguousEigenvalue);
FRAMETOP_DEFINE_ERROR(CutLocus);
FRAMETOP_DEFINE_ERROR(RetractionHitCriticalStratum);
FRAMETOP_DEFINE_ERROR(UndersampledLoop);
FRAMETOP_DEFINE_ERROR(ZeroEntry);
FRAMETOP_DEFINE_ERROR(NotInFiber);
FRAMETOP_DEFINE_ERROR(ParseError);

#undef FRAMETOP_DEFINE_ERROR

}  // namespace frametop
