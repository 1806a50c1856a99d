#include "pvsim/errors.hpp"

namespace pvsim {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NumericalRange: return "numerical-range";
    case ErrorKind::InconsistentDatasheet: return "inconsistent-datasheet";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::SingularStep: return "singular-step";
    case ErrorKind::OutOfModelRange: return "out-of-model-range";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::InvalidDatasheet: return "invalid-datasheet";
    case ErrorKind::UnknownPanel: return "unknown-panel";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    }
    return "unknown";
}

} // namespace pvsim
