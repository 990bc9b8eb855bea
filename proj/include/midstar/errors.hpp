#pragma once

#include <stdexcept>
#include <string>

namespace midstar {

enum class ErrorCode {
    Validation,
    Quantization,
    NonConvergent,
    AntipodalPair,
    OutsideU,
    OutsideW,
    BoundaryDivergence,
    DegenerateMidpoints,
    SideTooLong,
    DegenerateTriangle,
    DegreeTooHigh,
    IllConditioned,
    NearSingular,
    NoConvergence,
    SingularHessian,
    LeftDomain,
};

/// Base class for all library errors; `code()` drives the CLI exit-code mapping
/// (validation -> 2, non-convergence -> 3, domain errors -> 4).
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

#define MIDSTAR_DEFINE_ERROR(Name)                                                       \
    class Name##Error : public Error {                                                   \
      public:                                                                            \
        explicit Name##Error(const std::string& what) : Error(ErrorCode::Name, what) {}  \
    }

MIDSTAR_DEFINE_ERROR(Validation);
MIDSTAR_DEFINE_ERROR(Quantization);
MIDSTAR_DEFINE_ERROR(NonConvergent);
MIDSTAR_DEFINE_ERROR(AntipodalPair);
MIDSTAR_DEFINE_ERROR(OutsideU);
MIDSTAR_DEFINE_ERROR(OutsideW);
MIDSTAR_DEFINE_ERROR(BoundaryDivergence);
MIDSTAR_DEFINE_ERROR(DegenerateMidpoints);
MIDSTAR_DEFINE_ERROR(SideTooLong);
MIDSTAR_DEFINE_ERROR(DegenerateTriangle);
MIDSTAR_DEFINE_ERROR(DegreeTooHigh);
MIDSTAR_DEFINE_ERROR(IllConditioned);
MIDSTAR_DEFINE_ERROR(NearSingular);
MIDSTAR_DEFINE_ERROR(NoConvergence);
MIDSTAR_DEFINE_ERROR(SingularHessian);
MIDSTAR_DEFINE_ERROR(LeftDomain);

#undef MIDSTAR_DEFINE_ERROR

}  // namespace midstar
