#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ymh {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr const char* kVersion = "0.1.0";

/// Thrown on precondition violations (bad dimensions, foreign edges,
/// mismatched targets, malformed paths, ...).
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown on runtime numerical failures (retraction failure, oversized
/// integrator increments, insufficient signal in fits, ...).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

}  // namespace ymh
