#pragma once

#include <stdexcept>
#include <string>

namespace grflock {

/**
 * @brief Rejected input: a precondition or scenario invariant failed.
 *
 * `field` names the offending quantity ("params.k_a", "dt", ...) so the
 * CLI can emit an actionable diagnostic.
 */
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Numeric fault at run time (NaN/Inf escaped into a committed state).
class RuntimeFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace grflock
