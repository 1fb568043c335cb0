#pragma once

#include <stdexcept>
#include <string>

namespace gausspurify {

/// Thrown when an argument lies outside the domain of an operation
/// (e.g. s outside [0,1), k on the wrong side of 1 for a channel kind).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical integration did not reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double achieved_tolerance)
        : std::runtime_error(what), achieved_tolerance_(achieved_tolerance) {}

    double achieved_tolerance() const noexcept { return achieved_tolerance_; }

private:
    double achieved_tolerance_;
};

/// A truncated Fock-space computation would exceed its tail budget.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, int required_cutoff)
        : std::runtime_error(what), required_cutoff_(required_cutoff) {}

    /// Best available estimate of the cutoff that would satisfy the budget.
    int required_cutoff() const noexcept { return required_cutoff_; }

private:
    int required_cutoff_;
};

}  // namespace gausspurify
