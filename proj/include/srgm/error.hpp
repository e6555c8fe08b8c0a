#pragma once

#include <stdexcept>
#include <string>

namespace srgm {

/// Parameters do not satisfy the invariants of their model family.
class InvalidSpec : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain (negative time, zero stages, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Operation requested on a model family that does not support it.
class UnsupportedKind : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fewer observations than the model has free parameters.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data. `where` names the file / line the problem was found at
/// when that is known.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::string where = {})
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

}  // namespace srgm
