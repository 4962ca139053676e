#pragma once

#include <stdexcept>
#include <string>

namespace hwx {

// Every failure raised by the library derives from Error so callers can map
// the concrete type to an exit status or a diagnostic.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of an operation (negative t, a >= b, x not in K).
struct DomainError : Error {
    using Error::Error;
};

// Input is well formed but degenerate for the requested operation.
struct DegenerateInput : Error {
    using Error::Error;
};

// A quantity that should be bounded away from zero collapsed numerically.
struct NumericalFailure : Error {
    using Error::Error;
};

// Inputs violate an inequality the construction relies on.
struct InconsistencyError : Error {
    using Error::Error;
};

// Jets fail the certification needed before building an extension.
struct CertificationError : Error {
    using Error::Error;
};

// Building or welding the extension failed a postcondition.
struct AssemblyError : Error {
    using Error::Error;
};

// Job file or JSON fragment does not match the expected schema.
struct SchemaError : Error {
    using Error::Error;
};

// Broken internal invariant; indicates a bug rather than bad input.
struct InternalError : Error {
    using Error::Error;
};

}  // namespace hwx
