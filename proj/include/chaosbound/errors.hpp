// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace chaosbound {

/// Malformed or inconsistent caller input (shapes, ranges, file contents).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical solver could not produce a result (bracketing failure, divergence).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// |S|^p overflowed while accumulating a Monte Carlo moment.
class EstimatorUnstable : public std::runtime_error {
public:
    EstimatorUnstable(double p, const std::string& what)
        : std::runtime_error(what), p_(p) {}

    [[nodiscard]] double p() const noexcept { return p_; }

private:
    double p_;
};

}  // namespace chaosbound
