#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pvsim {

/// Failure classes surfaced by the library. The CLI and the HTTP service map
/// these onto exit codes and status codes.
enum class ErrorKind {
    NumericalRange,        ///< exponential overflow or other non-finite intermediate
    InconsistentDatasheet, ///< datasheet values admit no physical model (e.g. R_s < 0)
    NonConvergence,        ///< Newton iteration budget exhausted
    Divergence,            ///< Newton iterate left the admissible n interval
    SingularStep,          ///< zero derivative during a Newton step
    OutOfModelRange,       ///< environment outside what the model can represent
    Domain,                ///< argument outside an operation's domain
    InvalidDatasheet,      ///< malformed or invariant-violating datasheet document
    UnknownPanel,          ///< bundled panel lookup miss
    InvalidArgument,       ///< precondition violated by caller-supplied options
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace pvsim
