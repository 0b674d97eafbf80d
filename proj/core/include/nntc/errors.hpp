#ifndef NNTC_ERRORS_HPP
#define NNTC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nntc {

// Base class for all library errors. Subclasses carry no extra state
// beyond the message; catch sites dispatch on type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SyntaxError : Error {
    SyntaxError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line(line), column(column) {}
    int line;
    int column;
};

struct UnsupportedConstraint : SyntaxError {
    using SyntaxError::SyntaxError;
};

struct MissingVariable : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct DivisionByZero : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct IdMismatch : Error { using Error::Error; };
struct SlotCollision : Error { using Error::Error; };
struct UnfixableMiddle : Error { using Error::Error; };
struct AmbiguousIncomingFix : Error { using Error::Error; };
struct NonUnitFixedWeight : Error { using Error::Error; };
struct UnencodableFix : Error { using Error::Error; };
struct IncompatibleDimensions : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct ModeMismatch : Error { using Error::Error; };
struct UnsatisfyingAssignment : Error { using Error::Error; };
struct ZeroInverse : Error { using Error::Error; };
struct NonIdentityActivation : Error { using Error::Error; };
struct ZeroScalingWeight : Error { using Error::Error; };
struct NotZeroCost : Error { using Error::Error; };
struct NonFiniteCost : Error { using Error::Error; };
struct PassOrderViolation : Error { using Error::Error; };

} // namespace nntc

#endif
