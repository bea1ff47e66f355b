#pragma once

#include <stdexcept>
#include <string>

namespace diqkd {

/// Argument outside the mathematical domain of a function (beyond the allowed slack).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Constraint set of an optimization problem is empty.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// Source parameters describe a state that cannot be normalized
/// (a coupling singular value reached 1).
class UnnormalizableStateError : public std::runtime_error {
public:
    explicit UnnormalizableStateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace diqkd
