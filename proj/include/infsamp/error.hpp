#pragma once

#include <stdexcept>
#include <string>

namespace infsamp {

/// An input violates a hard constraint of the model (totals, bounds, ordering).
class ConstraintViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The sampling design cannot be realised, e.g. a unit would have inclusion probability >= 1.
class InfeasibleDesign : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A distribution parameter is outside its domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A matrix that must be positive definite is not.
class DecompositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** Raised when a sampler reaches a state that the algebra says is impossible (empty truncation
 * interval, non-positive sum of squares, failed initialisation).  The message identifies the block
 * and, where relevant, the site.
 */
class NumericalFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace infsamp
