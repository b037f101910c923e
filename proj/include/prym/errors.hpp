// Error types thrown by the library. Every failure mode that callers are
// expected to catch has its own class; the what() string carries context
// (which curve, which cycle, residual sizes) for diagnostics.

#pragma once

#include <stdexcept>
#include <string>

namespace prym {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define PRYM_DEFINE_ERROR(Name)                                  \
  struct Name : Error {                                          \
    explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
  }

// Curve construction and classification.
PRYM_DEFINE_ERROR(MalformedSpec);
PRYM_DEFINE_ERROR(SingularBase);
PRYM_DEFINE_ERROR(DegenerateDiscriminant);
PRYM_DEFINE_ERROR(NotFirstType);
PRYM_DEFINE_ERROR(NoSecondInvolution);

// Paths, continuation and homology.
PRYM_DEFINE_ERROR(NearBranchPoint);
PRYM_DEFINE_ERROR(LostSheet);
PRYM_DEFINE_ERROR(AdaptationFailed);
PRYM_DEFINE_ERROR(NonTransversal);

// Differentials.
PRYM_DEFINE_ERROR(UnsupportedFamily);
PRYM_DEFINE_ERROR(PoleHit);
PRYM_DEFINE_ERROR(NotHolomorphicAtInfinity);

// Periods.
PRYM_DEFINE_ERROR(QuadratureStall);
PRYM_DEFINE_ERROR(DegenerateAPeriods);
PRYM_DEFINE_ERROR(NotSymmetric);
PRYM_DEFINE_ERROR(NotConvergent);

// Theta evaluation.
PRYM_DEFINE_ERROR(NotConverged);
PRYM_DEFINE_ERROR(ThetaZero);

// Abel map and zero location.
PRYM_DEFINE_ERROR(IdenticallyZero);
PRYM_DEFINE_ERROR(ZeroLocationFailed);

// Inversion.
PRYM_DEFINE_ERROR(OrderTooLow);
PRYM_DEFINE_ERROR(ThetaZeroOnContour);
PRYM_DEFINE_ERROR(CalibrationInconsistent);
PRYM_DEFINE_ERROR(RootExtractionFailed);
PRYM_DEFINE_ERROR(BranchAmbiguous);

// Dynamics.
PRYM_DEFINE_ERROR(SingularSensitivity);
PRYM_DEFINE_ERROR(StepCollapse);
PRYM_DEFINE_ERROR(BranchCrossing);

#undef PRYM_DEFINE_ERROR

} // namespace prym
