// error.hpp - exception types shared by the bjj library and its tools

#pragma once

#include <stdexcept>
#include <string>

namespace bjj {

// Invalid input parameters: violated reality bound, mismatched particle
// numbers, unknown names. The CLI maps this to exit code 2.
class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure: non-convergence, step-size underflow, invariant drift.
// The CLI maps this to exit code 3.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bjj
