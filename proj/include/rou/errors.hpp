#pragma once

#include <stdexcept>
#include <string>

namespace rou {

/// Argument outside the documented domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Argument sits on a pole (e.g. Gamma at a non-positive integer).
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Series, root finder or quadrature failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure inside one stage of the estimation pipeline. The stage label is
/// kept separately so callers (CLI, harness) can report it.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace rou
