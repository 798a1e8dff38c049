#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cylfi {

// Base class for every error thrown by the engine.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dimension or rank mismatch between arguments.
struct shape_error : error {
    using error::error;
};

// Argument value outside the mathematical domain of the operation
// (non-symmetric form, imaginary part not positive semidefinite, odd
// Wick order, singular operator, ...).
struct domain_error : error {
    using error::error;
};

// A polynomial or tensor exceeds the functional's truncation degree.
// Always loud, never silent.
struct truncation_error : error {
    using error::error;
};

// A configured cap (Wick order, dense tensor size, quadrature dimension)
// would be exceeded.
struct resource_error : error {
    using error::error;
};

// Numerical degeneracy detected at run time: Gram matrix lost positive
// definiteness, quadrature box too small, ill-conditioned extrapolation.
struct numerical_error : error {
    using error::error;
};

// Too few samples for the requested operation.
struct insufficient_data_error : error {
    using error::error;
};

// A limit family failed to converge; carries human-readable diagnostics.
struct convergence_error : error {
    std::string diagnostics;

    explicit convergence_error(const std::string& msg, std::string diag = {})
        : error(msg), diagnostics(std::move(diag)) {}
};

// Text input could not be parsed; `position` is the 0-based offset of the
// offending character, suitable for printing a caret.
struct parse_error : error {
    std::size_t position;

    parse_error(const std::string& msg, std::size_t pos)
        : error(msg), position(pos) {}
};

} // namespace cylfi
