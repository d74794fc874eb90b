#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace beq {

/// Bad arguments, violated preconditions, malformed configs.
class invalid_input : public std::invalid_argument {
public:
    explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical breakdown that terminates a run rather than a bug:
/// NaN/Inf fields, sup-norm cap exceeded, Jacobian determinant at the floor.
class blowup_error : public std::runtime_error {
public:
    blowup_error(std::string reason_, const std::string& what)
        : std::runtime_error(what), reason(std::move(reason_)) {}
    std::string reason; // "nan" | "sup_norm" | "jacobian"
};

/// Per-node Newton solve for the inverse flow map failed to converge.
class newton_error : public std::runtime_error {
public:
    newton_error(std::size_t node_, double residual_, const std::string& what)
        : std::runtime_error(what), node(node_), residual(residual_) {}
    std::size_t node;
    double residual;
};

/// Fourier multiplier not invertible (or too ill-conditioned) on the grid.
class singular_symbol_error : public std::runtime_error {
public:
    singular_symbol_error(const std::string& what, double xi0, double xi1 = 0.0, double xi2 = 0.0)
        : std::runtime_error(what), xi{xi0, xi1, xi2} {}
    double xi[3]; // offending wavevector
};

} // namespace beq
