#pragma once

#include <stdexcept>
#include <string>

namespace isoflex {

// Base class for all domain errors thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct PreconditionError : Error { using Error::Error; };
struct DegenerateError : Error { using Error::Error; };
struct IsotropicPlaneError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };
struct NotDualConvexError : Error { using Error::Error; };
struct NotParallelSidesError : Error { using Error::Error; };
struct NotVParallelError : Error { using Error::Error; };
struct NotParallelError : Error { using Error::Error; };
struct NotInfinitesimallyFlexibleError : Error { using Error::Error; };
struct BoundaryVertexError : Error { using Error::Error; };
struct DegenerateDiagonalsError : Error { using Error::Error; };
struct NonConvexFaceError : Error { using Error::Error; };
struct DegenerateDeterminantError : Error { using Error::Error; };
struct CoplanarPairError : Error { using Error::Error; };
struct PropagationFailedError : Error {
    PropagationFailedError(const std::string& msg, int step) : Error(msg), step_index(step) {}
    int step_index = -1;
};
struct OutOfDomainError : Error { using Error::Error; };
struct QuadratureFailureError : Error { using Error::Error; };
struct AdmissibilityFailureError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace isoflex
