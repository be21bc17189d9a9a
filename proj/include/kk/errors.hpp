#pragma once

#include <stdexcept>
#include <string>

namespace kk {

/// Argument outside the mathematical domain of an operation (t < 0 for the
/// positive-ray Mittag-Leffler evaluator, |t| past the guard band, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iterative procedure failed to reach its tolerance; `achieved` carries the
/// best error estimate at the point of failure.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// A value is not representable in linear double precision; use the
/// log-space accessor instead.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

}  // namespace kk
