#pragma once

#include <stdexcept>
#include <string>

namespace snwave {

/// Argument outside the mathematical domain of an operation (k, t, T ranges).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent discretization or run parameters.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Zero pivot met while factorizing a tridiagonal system.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(std::size_t pivot, double value)
        : std::runtime_error("zero pivot at index " + std::to_string(pivot) +
                             " (value " + std::to_string(value) + ")"),
          pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// Non-finite values detected during a fixed-point sweep.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::string what, int iteration, double last_stop)
        : std::runtime_error(std::move(what)), iteration_(iteration), last_stop_(last_stop) {}

    int iteration() const noexcept { return iteration_; }
    double last_stopping_quantity() const noexcept { return last_stop_; }

private:
    int iteration_;
    double last_stop_;
};

}  // namespace snwave
