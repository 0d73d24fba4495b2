#ifndef PVORTEX_ERRORS_HPP
#define PVORTEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pvortex {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// geometry
struct MapNotInjective : Error { using Error::Error; };
struct OutsideTube : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct CurvatureSingularity : Error { using Error::Error; };

// greens
struct CoincidentPoints : Error { using Error::Error; };
struct InversionFailure : Error { using Error::Error; };
struct BoundaryPoint : Error { using Error::Error; };

// dynamics
struct CollisionTooClose : Error { using Error::Error; };
struct CollisionAbort : Error { using Error::Error; };
struct BoundaryAbort : Error { using Error::Error; };
struct StepSizeUnderflow : Error { using Error::Error; };

// orbit finding
struct NewtonDiverged : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct ContinuationStalled : Error { using Error::Error; };
struct SeparationViolated : Error { using Error::Error; };

// asymptotics
struct InsufficientFamily : Error { using Error::Error; };
struct PhaseMismatch : Error { using Error::Error; };

// cli
struct ConfigError : Error { using Error::Error; };

// recoverable signal from an ODE right-hand side: the trial state left the
// region where the field is defined, so the step must be rejected
struct StateInvalid : Error { using Error::Error; };

} // namespace pvortex

#endif
